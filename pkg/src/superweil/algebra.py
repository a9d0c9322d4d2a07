"""Finite-dimensional supercommutative local algebras with normal-form arithmetic.

An algebra is presented inside a truncated ambient: polynomials in ``k`` even
generators ``t1..tk`` and ``l`` odd generators ``z1..zl`` where every monomial
of total degree ``>= s`` vanishes, further quotiented by a graded ideal.  The
ideal is stored as a reduced row-echelon basis over the ambient monomials
(pivot = leading monomial under degree-lex order, even generators before odd);
the non-pivot monomials form the quotient basis and every product reduces to a
coefficient vector over it.

Every such algebra splits as scalars plus a nilpotent graded ideal, which is
what makes truncated-Taylor evaluation of smooth functions terminate.
"""

from __future__ import annotations

from itertools import combinations
from typing import NamedTuple

from .errors import AlgebraError, ParityError
from .fields import RATIONAL, Field
from .linalg import intersect_row_spaces, rref_desc

MAX_AMBIENT_DIM = 10_000

EVEN, ODD, MIXED, ZERO = "even", "odd", "mixed", "zero"


class Monomial(NamedTuple):
    """t^nu z^J with nu a tuple of even exponents and J an odd-index bitmask."""

    nu: tuple
    odd: int

    def degree(self):
        return sum(self.nu) + self.odd.bit_count()

    def parity(self):
        return self.odd.bit_count() & 1

    def odd_indices(self):
        """Ascending 1-based odd generator indices."""
        return tuple(j + 1 for j in range(self.odd.bit_length()) if self.odd >> j & 1)

    def is_one(self):
        return not self.odd and not any(self.nu)


def monomial_from_indices(nu, odd_indices):
    mask = 0
    for j in odd_indices:
        bit = 1 << (j - 1)
        if mask & bit:
            raise ParityError(f"odd index {j} repeated in monomial")
        mask |= bit
    return Monomial(tuple(nu), mask)


def merge_sign(mask_a, mask_b):
    """Sign (+1/-1) from sorting the concatenation of two ascending odd blocks.

    Counts transpositions, i.e. pairs (a, b) with a in the first block, b in
    the second and a > b.
    """
    count = 0
    m = mask_b
    while m:
        j = (m & -m).bit_length() - 1
        count += (mask_a >> (j + 1)).bit_count()
        m &= m - 1
    return -1 if count & 1 else 1


def mul_monomials(a, b):
    """(sign, product) in the free supercommutative algebra; (0, None) if a z repeats."""
    if a.odd & b.odd:
        return 0, None
    nu = tuple(x + y for x, y in zip(a.nu, b.nu))
    return merge_sign(a.odd, b.odd), Monomial(nu, a.odd | b.odd)


def _sort_key(m, l):
    bits = tuple((m.odd >> j) & 1 for j in range(l))
    return (m.degree(), m.nu, bits)


def _ambient_monomials(k, l, s):
    """All monomials of total degree < s, ascending in the monomial order."""
    out = []
    for odd_count in range(min(l, s - 1) + 1):
        for odd_combo in combinations(range(l), odd_count):
            mask = 0
            for j in odd_combo:
                mask |= 1 << j
            budget = s - 1 - odd_count
            for nu in _exponents_up_to(k, budget):
                out.append(Monomial(nu, mask))
    out.sort(key=lambda m: _sort_key(m, l))
    return out


def _exponents_up_to(k, budget):
    if k == 0:
        yield ()
        return
    for head in range(budget + 1):
        for tail in _exponents_up_to(k - 1, budget - head):
            yield (head,) + tail


def _monomials_of_degree(k, l, d):
    for odd_count in range(min(l, d) + 1):
        rest = d - odd_count
        for odd_combo in combinations(range(l), odd_count):
            mask = 0
            for j in odd_combo:
                mask |= 1 << j
            for nu in _exponents_up_to(k, rest):
                if sum(nu) == rest:
                    yield Monomial(nu, mask)


class SuperWeilAlgebra:
    """A quotient of the degree-truncated super polynomial ring.

    Instances are immutable after construction; build them through
    :func:`make_truncated`, :func:`make_grassmann`, :func:`quotient`,
    :func:`tensor` or :func:`join`.
    """

    def __init__(self, field, k, l, s, ideal_rows, _pivots=None):
        if s < 1:
            raise AlgebraError(f"invalid truncation order s={s}; need s >= 1")
        if k < 0 or l < 0:
            raise AlgebraError("generator counts must be non-negative")
        self.field = field
        self.k = k
        self.l = l
        self.s = s
        self.ambient_basis = _ambient_monomials(k, l, s)
        if len(self.ambient_basis) > MAX_AMBIENT_DIM:
            raise AlgebraError(
                f"ambient dimension {len(self.ambient_basis)} exceeds the "
                f"dense-representation cap {MAX_AMBIENT_DIM}"
            )
        self._ambient_index = {m: i for i, m in enumerate(self.ambient_basis)}
        if _pivots is None:
            ideal_rows, _pivots = rref_desc(
                ideal_rows, len(self.ambient_basis), field
            )
        self.ideal_rows = tuple(tuple(r) for r in ideal_rows)
        self.pivot_cols = tuple(_pivots)
        pivot_set = set(self.pivot_cols)
        if self._ambient_index.get(Monomial((0,) * k, 0)) in pivot_set:
            raise AlgebraError("ideal contains a unit; the quotient collapses")
        for row in self.ideal_rows:
            parities = {
                self.ambient_basis[i].parity()
                for i, c in enumerate(row)
                if not field.is_zero(c)
            }
            if len(parities) > 1:
                raise ParityError("ideal row is not parity-homogeneous")
        self.quotient_basis = tuple(
            m for i, m in enumerate(self.ambient_basis) if i not in pivot_set
        )
        self.basis_index = {m: i for i, m in enumerate(self.quotient_basis)}
        self._nf_cache = {}
        self._pair_cache = {}
        self._height = None
        self._width = None
        self._signature = (field.name, k, l, s, self.ideal_rows)

    # -- basic structure ------------------------------------------------

    @property
    def dim(self):
        return len(self.quotient_basis)

    def signature(self):
        return self._signature

    def __eq__(self, other):
        return (
            isinstance(other, SuperWeilAlgebra)
            and self._signature == other._signature
        )

    def __hash__(self):
        return hash(self._signature)

    def __repr__(self):
        return (
            f"SuperWeilAlgebra(k={self.k}, l={self.l}, s={self.s}, "
            f"dim={self.dim}, field={self.field.name})"
        )

    def same_presentation(self, other):
        return (
            self.field is other.field
            and self.k == other.k
            and self.l == other.l
            and self.s == other.s
        )

    def monomial_name(self, m):
        if m.is_one():
            return "1"
        parts = []
        for i, e in enumerate(m.nu):
            if e == 1:
                parts.append(f"t{i + 1}")
            elif e > 1:
                parts.append(f"t{i + 1}^{e}")
        for j in m.odd_indices():
            parts.append(f"z{j}")
        return "".join(parts)

    # -- elements ---------------------------------------------------------

    def element(self, coeffs):
        clean = {}
        for m, c in coeffs.items():
            c = self.field.coerce(c)
            if m not in self.basis_index:
                raise AlgebraError(f"monomial {self.monomial_name(m)} is not in the quotient basis")
            if not self.field.is_zero(c):
                clean[m] = c
        return AlgebraElement(self, clean)

    def zero(self):
        return AlgebraElement(self, {})

    def one(self):
        return self.scalar(1)

    def scalar(self, c):
        c = self.field.coerce(c)
        if self.field.is_zero(c):
            return self.zero()
        return AlgebraElement(self, {Monomial((0,) * self.k, 0): c})

    def gen_even(self, i):
        if not 1 <= i <= self.k:
            raise AlgebraError(f"even generator index {i} out of range 1..{self.k}")
        nu = tuple(1 if j == i - 1 else 0 for j in range(self.k))
        return self._reduced_monomial_element(Monomial(nu, 0))

    def gen_odd(self, j):
        if not 1 <= j <= self.l:
            raise AlgebraError(f"odd generator index {j} out of range 1..{self.l}")
        return self._reduced_monomial_element(Monomial((0,) * self.k, 1 << (j - 1)))

    def generators(self):
        return [self.gen_even(i) for i in range(1, self.k + 1)] + [
            self.gen_odd(j) for j in range(1, self.l + 1)
        ]

    def basis_elements(self):
        return [AlgebraElement(self, {m: self.field.one}) for m in self.quotient_basis]

    def _reduced_monomial_element(self, m):
        return AlgebraElement(self, dict(self._normal_form(m)))

    # -- normal forms ------------------------------------------------------

    def _normal_form(self, m):
        """Normal form of an ambient monomial as {quotient monomial: coeff}."""
        cached = self._nf_cache.get(m)
        if cached is not None:
            return cached
        if m.degree() >= self.s:
            nf = {}
        elif m in self.basis_index:
            nf = {m: self.field.one}
        else:
            col = self._ambient_index[m]
            row_i = self.pivot_cols.index(col)
            row = self.ideal_rows[row_i]
            nf = {}
            for i, c in enumerate(row):
                if i == col or self.field.is_zero(c):
                    continue
                nf[self.ambient_basis[i]] = -c
        self._nf_cache[m] = nf
        return nf

    def _mul_basis(self, m1, m2):
        key = (m1, m2)
        cached = self._pair_cache.get(key)
        if cached is not None:
            return cached
        sign, prod = mul_monomials(m1, m2)
        if prod is None or prod.degree() >= self.s:
            result = {}
        else:
            nf = self._normal_form(prod)
            result = nf if sign == 1 else {m: -c for m, c in nf.items()}
        self._pair_cache[key] = result
        return result

    # -- derived structure ---------------------------------------------------

    def nil_monomials(self):
        return [m for m in self.quotient_basis if not m.is_one()]

    def is_purely_even(self):
        return all(m.parity() == 0 for m in self.quotient_basis)

    def _subspace_power_dims(self):
        """Dims of the powers of the nilpotent ideal, computed by brute products."""
        field = self.field
        dim = self.dim
        nil = []
        for m in self.nil_monomials():
            row = [field.zero] * dim
            row[self.basis_index[m]] = field.one
            nil.append(row)
        nil, _ = rref_desc(nil, dim, field)
        dims = []
        current = nil
        nil_elements = [self._row_to_element(r) for r in nil]
        while current:
            dims.append(len(current))
            nxt = []
            for row in current:
                u = self._row_to_element(row)
                for v in nil_elements:
                    w = u * v
                    if not w.is_zero():
                        nxt.append(self._element_to_row(w))
            current, _ = rref_desc(nxt, dim, field)
        return dims

    def _row_to_element(self, row):
        return AlgebraElement(
            self,
            {
                self.quotient_basis[i]: c
                for i, c in enumerate(row)
                if not self.field.is_zero(c)
            },
        )

    def _element_to_row(self, elem):
        row = [self.field.zero] * self.dim
        for m, c in elem.coeffs.items():
            row[self.basis_index[m]] = c
        return row

    def height(self):
        """Smallest r such that the (r+1)-st power of the nilpotent ideal is 0."""
        if self._height is None:
            self._height = len(self._subspace_power_dims())
            self._width = None
        return self._height

    def width(self):
        """Dimension of nil modulo nil^2."""
        dims = self._subspace_power_dims()
        self._height = len(dims)
        if not dims:
            return 0
        return dims[0] - (dims[1] if len(dims) > 1 else 0)


class AlgebraElement:
    """Sparse coefficient vector over an algebra's quotient basis (normal form)."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = coeffs

    # -- ring operations --------------------------------------------------

    def _check_same(self, other):
        if self.algebra is not other.algebra and self.algebra != other.algebra:
            raise AlgebraError("elements live in different algebras")

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.algebra.scalar(other)
        self._check_same(other)
        field = self.algebra.field
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            v = out.get(m, field.zero) + c
            if field.is_zero(v):
                out.pop(m, None)
            else:
                out[m] = v
        return AlgebraElement(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.algebra, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, AlgebraElement):
            other = self.algebra.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + self.algebra.scalar(other)

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._check_same(other)
        field = self.algebra.field
        out = {}
        mul_basis = self.algebra._mul_basis
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                c12 = c1 * c2
                for m, c in mul_basis(m1, m2).items():
                    v = out.get(m, field.zero) + c12 * c
                    if field.is_zero(v):
                        out.pop(m, None)
                    else:
                        out[m] = v
        return AlgebraElement(self.algebra, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = self.algebra.field.coerce(c)
        if self.algebra.field.is_zero(c):
            return self.algebra.zero()
        return AlgebraElement(self.algebra, {m: c * v for m, v in self.coeffs.items()})

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise AlgebraError("element powers need a non-negative integer exponent")
        result = self.algebra.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraElement)
            and self.algebra == other.algebra
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.algebra, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        name = self.algebra.monomial_name
        parts = []
        for m in sorted(self.coeffs, key=lambda m: _sort_key(m, self.algebra.l)):
            c = self.coeffs[m]
            parts.append(f"{c}" if m.is_one() else f"{c}*{name(m)}")
        return " + ".join(parts)

    # -- structure maps ----------------------------------------------------

    def is_zero(self):
        return not self.coeffs

    def coefficient(self, m):
        return self.coeffs.get(m, self.algebra.field.zero)

    def body(self):
        """Scalar part: the coefficient of 1."""
        return self.coefficient(Monomial((0,) * self.algebra.k, 0))

    def soul(self):
        """Nilpotent part: the element minus its body."""
        one = Monomial((0,) * self.algebra.k, 0)
        return AlgebraElement(
            self.algebra, {m: c for m, c in self.coeffs.items() if m != one}
        )

    def parity(self):
        if not self.coeffs:
            return ZERO
        parities = {m.parity() for m in self.coeffs}
        if parities == {0}:
            return EVEN
        if parities == {1}:
            return ODD
        return MIXED

    def even_part(self):
        return AlgebraElement(
            self.algebra, {m: c for m, c in self.coeffs.items() if m.parity() == 0}
        )

    def odd_part(self):
        return AlgebraElement(
            self.algebra, {m: c for m, c in self.coeffs.items() if m.parity() == 1}
        )

    def nilpotency_order(self):
        """Smallest r with self^(r+1) = 0; raises if the element is a unit."""
        if not self.algebra.field.is_zero(self.body()):
            raise AlgebraError("element with non-zero body is not nilpotent")
        r = 0
        power = self
        while not power.is_zero():
            power = power * self
            r += 1
            if r > self.algebra.height() + 1:
                raise AlgebraError("nilpotency iteration exceeded the height bound")
        return r

    def inverse(self):
        """Multiplicative inverse via the finite geometric series on the soul."""
        field = self.algebra.field
        if self.parity() not in (EVEN, ZERO):
            raise ParityError("only even elements with non-zero body are invertible")
        b = self.body()
        if field.is_zero(b):
            raise AlgebraError("element with zero body is not invertible")
        u = self.soul().scale(1 / b)
        inv = self.algebra.one()
        term = self.algebra.one()
        for _ in range(self.algebra.height()):
            term = term * (-u)
            if term.is_zero():
                break
            inv = inv + term
        return inv.scale(1 / b)

    def norm(self):
        field = self.algebra.field
        return max((field.norm(c) for c in self.coeffs.values()), default=0.0)


def invert(a):
    return a.inverse()


def body(a):
    return a.body()


def soul(a):
    return a.soul()


def parity(a):
    return a.parity()


def height(algebra):
    return algebra.height()


def width(algebra):
    return algebra.width()


# -- constructors ------------------------------------------------------------


def make_truncated(k, l, s, field: Field = RATIONAL):
    """Polynomials in k even and l odd generators with all degree >= s monomials killed."""
    return SuperWeilAlgebra(field, k, l, s, [])


def make_grassmann(q, field: Field = RATIONAL):
    """Exterior algebra on q odd generators (dimension 2^q)."""
    if q < 0:
        raise AlgebraError("Grassmann algebra needs q >= 0")
    return make_truncated(0, q, q + 1, field)


def make_dual_numbers(field: Field = RATIONAL):
    """K[t]/t^2: one even generator squaring to zero."""
    return make_truncated(1, 0, 2, field)


def make_super_dual_numbers(field: Field = RATIONAL):
    """K[t,z]/<t^2, tz, z^2>; basis {1, t, z}, height 1."""
    return make_truncated(1, 1, 2, field)


def quotient(ambient, gens):
    """Quotient of ``ambient`` by the graded ideal generated by ``gens``.

    Each generator must be parity-homogeneous and have zero body.  The ideal
    is spanned linearly by generator-times-monomial products; row reduction
    picks leading monomials as pivots and the remaining monomials form the new
    quotient basis.  Returns ``(quotient_algebra, projection_morphism)``.
    """
    field = ambient.field
    rows = [list(r) for r in _embed_rows(ambient, ambient)]
    for g in gens:
        if g.algebra != ambient:
            raise AlgebraError("quotient generator is not an ambient element")
        p = g.parity()
        if p == MIXED:
            raise ParityError("quotient generator is not parity-homogeneous")
        if not field.is_zero(g.body()):
            raise AlgebraError(
                "quotient generator has non-zero body; the ideal would contain a unit"
            )
        if p == ZERO:
            continue
        # g * (pivot monomial) is a combination of g * (basis monomials) modulo
        # the ambient rows already included, so the quotient basis suffices
        for m in ambient.quotient_basis:
            prod = g * AlgebraElement(ambient, {m: field.one})
            if not prod.is_zero():
                rows.append(_ambient_row(ambient, prod))
    quo = SuperWeilAlgebra(field, ambient.k, ambient.l, ambient.s, rows)
    proj = make_morphism(
        ambient,
        quo,
        [quo.gen_even(i) for i in range(1, ambient.k + 1)],
        [quo.gen_odd(j) for j in range(1, ambient.l + 1)],
    )
    return quo, proj


def _ambient_row(algebra, elem):
    """Element written as a dense vector over the ambient monomial list."""
    row = [algebra.field.zero] * len(algebra.ambient_basis)
    for m, c in elem.coeffs.items():
        row[algebra._ambient_index[m]] = c
    return row


def _embed_rows(src, dst):
    """Re-index ideal rows of ``src`` into ``dst``'s ambient (same presentation)."""
    out = []
    for row in src.ideal_rows:
        vec = [dst.field.zero] * len(dst.ambient_basis)
        for i, c in enumerate(row):
            if not src.field.is_zero(c):
                vec[dst._ambient_index[src.ambient_basis[i]]] = c
        out.append(vec)
    return out


def tensor(a, b):
    """Graded tensor product with its two canonical inclusions.

    Generators are the disjoint union (a's block first); the sign rule
    (x ⊗ y)(x' ⊗ y') = (-1)^{p(y)p(x')} xx' ⊗ yy' falls out of the odd-index
    merge sign because a-indices stay below b-indices.
    """
    if a.field is not b.field:
        raise AlgebraError("tensor factors must share a scalar field")
    field = a.field
    k, l, s = a.k + b.k, a.l + b.l, a.s + b.s - 1
    ambient = make_truncated(k, l, s, field)

    def embed_a(m):
        return Monomial(m.nu + (0,) * b.k, m.odd)

    def embed_b(m):
        return Monomial((0,) * a.k + m.nu, m.odd << a.l)

    gens = []
    for src, embed in ((a, embed_a), (b, embed_b)):
        for row in src.ideal_rows:
            coeffs = {}
            for i, c in enumerate(row):
                if not src.field.is_zero(c):
                    coeffs[embed(src.ambient_basis[i])] = c
            gens.append(ambient.element(coeffs))
        for m in _monomials_of_degree(src.k, src.l, src.s):
            if m.degree() < s:  # else structurally zero in the joint ambient
                gens.append(ambient.element({embed(m): field.one}))
    prod, _ = quotient(ambient, gens)
    incl_a = make_morphism(
        a,
        prod,
        [prod.gen_even(i) for i in range(1, a.k + 1)],
        [prod.gen_odd(j) for j in range(1, a.l + 1)],
    )
    incl_b = make_morphism(
        b,
        prod,
        [prod.gen_even(a.k + i) for i in range(1, b.k + 1)],
        [prod.gen_odd(a.l + j) for j in range(1, b.l + 1)],
    )
    return prod, incl_a, incl_b


def join(a1, a2):
    """Smallest common refinement of two quotients of one truncated ambient.

    Both arguments must be presented over the same (k, l, s, field); the
    result quotients the ambient by the intersection of the two ideal
    subspaces and comes with the surjections onto each input.
    """
    if not a1.same_presentation(a2):
        raise AlgebraError("join needs both algebras over one common ambient")
    field = a1.field
    ncols = len(a1.ambient_basis)
    rows = intersect_row_spaces(
        [list(r) for r in a1.ideal_rows],
        [list(r) for r in _embed_rows(a2, a1)],
        ncols,
        field,
    )
    # the intersection of graded subspaces is graded: split rows by parity
    graded = []
    for row in rows:
        for want in (0, 1):
            part = [
                c if a1.ambient_basis[i].parity() == want else field.zero
                for i, c in enumerate(row)
            ]
            if any(not field.is_zero(c) for c in part):
                graded.append(part)
    joined = SuperWeilAlgebra(field, a1.k, a1.l, a1.s, graded)
    projections = tuple(
        make_morphism(
            joined,
            target,
            [target.gen_even(i) for i in range(1, joined.k + 1)],
            [target.gen_odd(j) for j in range(1, joined.l + 1)],
        )
        for target in (a1, a2)
    )
    return joined, projections[0], projections[1]


# -- morphisms ----------------------------------------------------------------


class AlgebraMorphism:
    """Unital parity-preserving algebra map fixed by generator images."""

    __slots__ = ("source", "target", "even_images", "odd_images", "_cache")

    def __init__(self, source, target, even_images, odd_images):
        self.source = source
        self.target = target
        self.even_images = tuple(even_images)
        self.odd_images = tuple(odd_images)
        self._cache = {}

    def __call__(self, elem):
        return apply_morphism(self, elem)

    def __repr__(self):
        return f"AlgebraMorphism({self.source!r} -> {self.target!r})"

    def __eq__(self, other):
        return (
            isinstance(other, AlgebraMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.even_images == other.even_images
            and self.odd_images == other.odd_images
        )

    def monomial_image(self, m):
        cached = self._cache.get(m)
        if cached is None:
            cached = self.target.one()
            for i, e in enumerate(m.nu):
                if e:
                    cached = cached * self.even_images[i] ** e
            for j in m.odd_indices():
                cached = cached * self.odd_images[j - 1]
            self._cache[m] = cached
        return cached


def make_morphism(source, target, even_images, odd_images, _validate=True):
    """The unique unital algebra map sending generators to the given images.

    Images must parity-match, have zero body, and kill every source relation
    (ideal rows plus all monomials at the truncation degree); this is checked
    by evaluation at construction.
    """
    even_images = [_as_element(target, v) for v in even_images]
    odd_images = [_as_element(target, v) for v in odd_images]
    if len(even_images) != source.k or len(odd_images) != source.l:
        raise AlgebraError("generator image counts do not match the source")
    if source.field is not target.field:
        raise AlgebraError("morphism endpoints must share a scalar field")
    rho = AlgebraMorphism(source, target, even_images, odd_images)
    if not _validate:
        return rho
    field = target.field
    for v in even_images:
        if v.parity() not in (EVEN, ZERO):
            raise ParityError("image of an even generator must be even")
        if not field.is_zero(v.body()):
            raise AlgebraError("generator images must have zero body")
    for v in odd_images:
        if v.parity() not in (ODD, ZERO):
            raise ParityError("image of an odd generator must be odd")
    scale = max([v.norm() for v in even_images + odd_images], default=1.0)
    for m in _monomials_of_degree(source.k, source.l, source.s):
        img = rho.monomial_image(m)
        if not _negligible_element(img, scale ** max(m.degree(), 1)):
            raise AlgebraError(
                f"images violate the truncation relation {source.monomial_name(m)} = 0"
            )
    for row in source.ideal_rows:
        acc = target.zero()
        for i, c in enumerate(row):
            if not field.is_zero(c):
                acc = acc + rho.monomial_image(source.ambient_basis[i]).scale(c)
        if not _negligible_element(acc, scale):
            raise AlgebraError("images are incompatible with a source relation")
    return rho


def _as_element(algebra, value):
    if isinstance(value, AlgebraElement):
        if value.algebra != algebra:
            raise AlgebraError("image element lives in the wrong algebra")
        return value
    return algebra.scalar(value)


def _negligible_element(elem, scale):
    field = elem.algebra.field
    if field.exact:
        return elem.is_zero()
    return elem.norm() <= 1e-9 * max(1.0, scale)


def apply_morphism(rho, elem):
    """Image of an element: substitute generator images and reduce in the target."""
    if elem.algebra != rho.source:
        raise AlgebraError("element does not belong to the morphism's source")
    out = rho.target.zero()
    for m, c in elem.coeffs.items():
        out = out + rho.monomial_image(m).scale(c)
    return out


def compose_morphisms(outer, inner):
    """outer ∘ inner (apply ``inner`` first)."""
    if inner.target != outer.source:
        raise AlgebraError("morphisms are not composable")
    return make_morphism(
        inner.source,
        outer.target,
        [outer(v) for v in inner.even_images],
        [outer(v) for v in inner.odd_images],
        _validate=False,
    )


def identity_morphism(algebra):
    return make_morphism(
        algebra,
        algebra,
        [algebra.gen_even(i) for i in range(1, algebra.k + 1)],
        [algebra.gen_odd(j) for j in range(1, algebra.l + 1)],
        _validate=False,
    )


def scalar_projection(algebra):
    """The body map onto the trivial algebra K (all generators to zero)."""
    target = make_truncated(0, 0, 1, algebra.field)
    return make_morphism(
        algebra,
        target,
        [target.zero()] * algebra.k,
        [target.zero()] * algebra.l,
        _validate=False,
    )
