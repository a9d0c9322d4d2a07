"""Superdomains and their symbolic sections.

A section is an expression tree in p even and q odd coordinates over an open
region of K^p.  The operations here are purely symbolic: super partial
derivatives (odd derivatives act from the left), the component normal form
s = sum_J s_J theta^J with even-only component functions, and classical
evaluation (all odd coordinates to zero).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from math import factorial

from . import expr as ex
from .errors import EvaluationError, ParityError, RegionError
from .fields import Field, infer_field


@dataclass(frozen=True)
class SuperDomain:
    """p|q coordinates over an open box in K^p, optionally cut by a predicate.

    Box entries are (lo, hi) pairs with lo < hi, or None for an unbounded
    axis; on the complex field the box constrains coordinate moduli.  The
    predicate receives the p-tuple of body values and must be cheap; it is
    consulted at evaluation time only.
    """

    p: int
    q: int
    box: tuple = None
    predicate: object = dataclass_field(default=None, compare=False)

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise RegionError("dimensions must be non-negative")
        if self.box is not None:
            if len(self.box) != self.p:
                raise RegionError("box must have one interval per even coordinate")
            for interval in self.box:
                if interval is None:
                    continue
                lo, hi = interval
                if lo is not None and hi is not None and not lo < hi:
                    raise RegionError(f"empty interval {interval} in region box")

    def contains(self, point, scalar_field: Field = None):
        if len(point) != self.p:
            return False
        if scalar_field is None:
            scalar_field = infer_field(point)
        if self.box is not None:
            for v, interval in zip(point, self.box):
                if interval is None:
                    continue
                lo, hi = interval
                if not scalar_field.in_interval(v, lo, hi):
                    return False
        if self.predicate is not None and not self.predicate(tuple(point)):
            return False
        return True

    def require_contains(self, point, scalar_field: Field = None):
        if not self.contains(point, scalar_field):
            raise RegionError(f"base point {tuple(point)} is outside the region")

    def same_dims(self, other):
        return self.p == other.p and self.q == other.q


@dataclass(frozen=True)
class Section:
    """A symbolic superfunction attached to a domain."""

    domain: SuperDomain
    expr: ex.Expr

    def __post_init__(self):
        p, q = ex.max_indices(self.expr)
        if p > self.domain.p or q > self.domain.q:
            raise RegionError(
                f"expression uses coordinates up to {p}|{q} but the domain is "
                f"{self.domain.p}|{self.domain.q}"
            )

    @property
    def parity(self):
        return self.expr.parity


def section(domain, text_or_expr):
    """Build a section from grammar text or an existing expression."""
    if isinstance(text_or_expr, str):
        return Section(domain, ex.parse_expr(text_or_expr, domain.p, domain.q))
    return Section(domain, text_or_expr)


# -- differentiation -------------------------------------------------------------


def derive_expr_even(e, i):
    """Partial derivative along x_i, chain rule through analytic nodes."""
    if isinstance(e, ex.EvenCoord):
        return ex.ONE if e.i == i else ex.ZERO
    if isinstance(e, (ex.OddCoord, ex.Const)):
        return ex.ZERO
    if isinstance(e, ex.Add):
        return ex.add(derive_expr_even(e.a, i), derive_expr_even(e.b, i))
    if isinstance(e, ex.Neg):
        return ex.neg(derive_expr_even(e.a, i))
    if isinstance(e, ex.ScalarMul):
        return ex.scalar_mul(e.c, derive_expr_even(e.a, i))
    if isinstance(e, ex.Mul):
        return ex.add(
            ex.mul(derive_expr_even(e.a, i), e.b),
            ex.mul(e.a, derive_expr_even(e.b, i)),
        )
    if isinstance(e, ex.IntPow):
        da = derive_expr_even(e.a, i)
        return ex.scalar_mul(e.n, ex.mul(ex.int_pow(e.a, e.n - 1), da))
    if isinstance(e, ex.Apply):
        da = derive_expr_even(e.a, i)
        return ex.mul(_analytic_derivative_expr(e.fn, e.a), da)
    raise EvaluationError(f"cannot differentiate node {e!r}")


def _analytic_derivative_expr(fn, a):
    if fn == "exp":
        return ex.Apply("exp", a)
    if fn == "log":
        return ex.reciprocal(a)
    if fn == "sin":
        return ex.Apply("cos", a)
    if fn == "cos":
        return ex.neg(ex.Apply("sin", a))
    if fn == "reciprocal":
        return ex.neg(ex.mul(ex.reciprocal(a), ex.reciprocal(a)))
    raise EvaluationError(f"unknown analytic function {fn!r}")


def _analytic_nth_derivative_expr(fn, n, a):
    """Closed-form n-th derivative of an analytic node, as an expression."""
    if n == 0:
        return ex.Apply(fn, a)
    if fn == "exp":
        return ex.Apply("exp", a)
    if fn == "log":
        sign = Fraction((-1) ** (n - 1) * factorial(n - 1))
        return ex.scalar_mul(sign, ex.int_pow(ex.reciprocal(a), n))
    if fn == "reciprocal":
        sign = Fraction((-1) ** n * factorial(n))
        return ex.scalar_mul(sign, ex.int_pow(ex.reciprocal(a), n + 1))
    if fn in ("sin", "cos"):
        k = (n + (0 if fn == "sin" else 1)) % 4
        base = ex.Apply("sin" if k % 2 == 0 else "cos", a)
        return ex.neg(base) if k in (2, 3) else base
    raise EvaluationError(f"unknown analytic function {fn!r}")


def derive_expr_odd(e, j):
    """Left derivative along theta_j, via the component normal form."""
    comps = _components(e)
    bit = 1 << (j - 1)
    out = ex.ZERO
    for mask, coef in comps.items():
        if not mask & bit:
            continue
        position = bin(mask & (bit - 1)).count("1")  # thetas before j in ascending J
        term = ex.scalar_mul(Fraction((-1) ** position), coef)
        out = ex.add(out, _attach_odds(term, mask & ~bit))
    return out


def super_derive(s: Section, var):
    """Super partial derivative of a section along a coordinate node."""
    if isinstance(var, ex.EvenCoord):
        if not 1 <= var.i <= s.domain.p:
            raise RegionError(f"even coordinate x{var.i} not on the domain")
        return Section(s.domain, derive_expr_even(s.expr, var.i))
    if isinstance(var, ex.OddCoord):
        if not 1 <= var.j <= s.domain.q:
            raise RegionError(f"odd coordinate theta{var.j} not on the domain")
        return Section(s.domain, derive_expr_odd(s.expr, var.j))
    raise ParityError("derivative variable must be an EvenCoord or OddCoord")


def d_even(s, i):
    return super_derive(s, ex.EvenCoord(i))


def d_odd(s, j):
    return super_derive(s, ex.OddCoord(j))


# -- component normal form ---------------------------------------------------------


def _attach_odds(coef, mask):
    out = coef
    j = 1
    m = mask
    while m:
        if m & 1:
            out = ex.mul(out, ex.OddCoord(j))
        m >>= 1
        j += 1
    return out


def _components(e):
    """{odd mask: even-only Expr}; products push thetas right with merge signs."""
    from .algebra import merge_sign

    if isinstance(e, ex.OddCoord):
        return {1 << (e.j - 1): ex.ONE}
    if isinstance(e, (ex.EvenCoord, ex.Const)):
        return {0: e} if not ex.is_zero_const(e) else {}
    if isinstance(e, ex.Add):
        out = dict(_components(e.a))
        for mask, coef in _components(e.b).items():
            if mask in out:
                out[mask] = ex.add(out[mask], coef)
            else:
                out[mask] = coef
        return out
    if isinstance(e, ex.Neg):
        return {m: ex.neg(c) for m, c in _components(e.a).items()}
    if isinstance(e, ex.ScalarMul):
        return {m: ex.scalar_mul(e.c, c) for m, c in _components(e.a).items()}
    if isinstance(e, ex.Mul):
        out = {}
        cb = _components(e.b)
        for ma, fa in _components(e.a).items():
            for mb, fb in cb.items():
                if ma & mb:
                    continue
                sign = merge_sign(ma, mb)
                term = ex.mul(fa, fb)
                if sign < 0:
                    term = ex.neg(term)
                mask = ma | mb
                out[mask] = ex.add(out[mask], term) if mask in out else term
        return out
    if isinstance(e, ex.IntPow):
        out = {0: ex.ONE}
        base = _components(e.a)
        for _ in range(e.n):
            out = _mul_components(out, base)
        return out
    if isinstance(e, ex.Apply):
        comps = _components(e.a)
        base = comps.get(0, ex.ZERO)
        nil = {m: c for m, c in comps.items() if m}
        # f(base + n) with n nilpotent: truncated Taylor series in n; every
        # term of n holds >= 2 odd coordinates, so n^(floor(q/2)+1) = 0
        out = {0: ex.Apply(e.fn, base)}
        power = {0: ex.ONE}
        n = 1
        inv_fact = Fraction(1)
        while True:
            power = _mul_components(power, nil)
            if not power:
                break
            inv_fact /= n
            deriv = _analytic_nth_derivative_expr(e.fn, n, base)
            for mask, coef in power.items():
                term = ex.scalar_mul(inv_fact, ex.mul(deriv, coef))
                out[mask] = ex.add(out[mask], term) if mask in out else term
            n += 1
        return out
    raise EvaluationError(f"cannot normalize node {e!r}")


def _mul_components(ca, cb):
    from .algebra import merge_sign

    out = {}
    for ma, fa in ca.items():
        for mb, fb in cb.items():
            if ma & mb:
                continue
            sign = merge_sign(ma, mb)
            term = ex.mul(fa, fb)
            if sign < 0:
                term = ex.neg(term)
            mask = ma | mb
            out[mask] = ex.add(out[mask], term) if mask in out else term
    return out


def mask_to_indices(mask):
    return tuple(j + 1 for j in range(mask.bit_length()) if mask >> j & 1)


def indices_to_mask(indices):
    mask = 0
    for j in indices:
        mask |= 1 << (j - 1)
    return mask


def normalize_components(s: Section):
    """Map from ascending odd index tuples J to even-only component expressions.

    Reconstructing sum_J s_J theta^J gives a section semantically equal to s;
    syntactically-zero components are dropped.
    """
    out = {}
    for mask, coef in _components(s.expr).items():
        if not ex.is_zero_const(coef):
            out[mask_to_indices(mask)] = coef
    return out


def components_to_expr(components):
    """Rebuild sum_J s_J theta^J from a component map keyed by index tuples."""
    out = ex.ZERO
    for indices, coef in sorted(components.items()):
        out = ex.add(out, _attach_odds(coef, indices_to_mask(indices)))
    return out


# -- classical evaluation -----------------------------------------------------------


def eval_expr_classical(e, point, scalar_field):
    """Evaluate with all odd coordinates at zero (the body of the section)."""
    if isinstance(e, ex.Const):
        return scalar_field.coerce(e.value)
    if isinstance(e, ex.EvenCoord):
        return scalar_field.coerce(point[e.i - 1])
    if isinstance(e, ex.OddCoord):
        return scalar_field.zero
    if isinstance(e, ex.Add):
        return eval_expr_classical(e.a, point, scalar_field) + eval_expr_classical(
            e.b, point, scalar_field
        )
    if isinstance(e, ex.Mul):
        return eval_expr_classical(e.a, point, scalar_field) * eval_expr_classical(
            e.b, point, scalar_field
        )
    if isinstance(e, ex.Neg):
        return -eval_expr_classical(e.a, point, scalar_field)
    if isinstance(e, ex.ScalarMul):
        return scalar_field.coerce(e.c) * eval_expr_classical(e.a, point, scalar_field)
    if isinstance(e, ex.IntPow):
        return eval_expr_classical(e.a, point, scalar_field) ** e.n
    if isinstance(e, ex.Apply):
        v = eval_expr_classical(e.a, point, scalar_field)
        if e.fn == "reciprocal":
            if scalar_field.is_zero(v):
                raise EvaluationError("reciprocal evaluated at zero")
            return 1 / v
        return scalar_field.function_value(e.fn, v)
    raise EvaluationError(f"cannot evaluate node {e!r}")


def eval_classical(s: Section, point, scalar_field: Field = None):
    """Value of the empty-odd component at a region point."""
    if scalar_field is None:
        scalar_field = infer_field(point)
    point = tuple(scalar_field.coerce(v) for v in point)
    s.domain.require_contains(point, scalar_field)
    return eval_expr_classical(s.expr, point, scalar_field)
