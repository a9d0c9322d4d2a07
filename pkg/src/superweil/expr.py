"""Parity-tracked symbolic expressions in even and odd coordinates.

Even coordinates are written ``x1..xp``, odd ones ``theta1..thetaq``.  Each
node carries its parity ("even", "odd" or "mixed"); analytic nodes (exp, log,
sin, cos, reciprocal, integer powers) accept even operands only, which is
checked at construction.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParityError, ParseError
from .fields import ANALYTIC_FUNCTIONS

EVEN, ODD, MIXED = "even", "odd", "mixed"

_TRANSCENDENTAL = ("exp", "log", "sin", "cos")


class Expr:
    """Base expression node.  Operators build trees with constant folding."""

    __slots__ = ("parity",)

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return add(self, neg(as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), neg(self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n):
        return int_pow(self, n)

    def __eq__(self, other):
        return isinstance(other, Expr) and _struct_key(self) == _struct_key(other)

    def __hash__(self):
        return hash(_struct_key(self))

    def __repr__(self):
        return f"Expr({to_text(self)})"


class EvenCoord(Expr):
    __slots__ = ("i",)

    def __init__(self, i):
        if i < 1:
            raise ParseError(f"even coordinate index {i} must be >= 1")
        self.i = i
        self.parity = EVEN


class OddCoord(Expr):
    __slots__ = ("j",)

    def __init__(self, j):
        if j < 1:
            raise ParseError(f"odd coordinate index {j} must be >= 1")
        self.j = j
        self.parity = ODD


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, int):
            value = Fraction(value)
        self.value = value
        self.parity = EVEN


class Add(Expr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b
        self.parity = a.parity if a.parity == b.parity else MIXED


class Mul(Expr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b
        if MIXED in (a.parity, b.parity):
            self.parity = MIXED
        else:
            self.parity = ODD if a.parity != b.parity else EVEN


class Neg(Expr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a
        self.parity = a.parity


class ScalarMul(Expr):
    __slots__ = ("c", "a")

    def __init__(self, c, a):
        if isinstance(c, int):
            c = Fraction(c)
        self.c = c
        self.a = a
        self.parity = a.parity


class Apply(Expr):
    """Analytic unary node: exp, log, sin, cos or reciprocal."""

    __slots__ = ("fn", "a")

    def __init__(self, fn, a):
        if fn not in ANALYTIC_FUNCTIONS:
            raise ParseError(f"unknown analytic function {fn!r}")
        if a.parity != EVEN:
            raise ParityError(f"{fn} needs an even operand, got {a.parity}")
        self.fn = fn
        self.a = a
        self.parity = EVEN


class IntPow(Expr):
    __slots__ = ("a", "n")

    def __init__(self, a, n):
        if not isinstance(n, int) or n < 0:
            raise ParseError("integer power needs a non-negative int exponent")
        if a.parity != EVEN:
            raise ParityError(f"integer power needs an even operand, got {a.parity}")
        self.a = a
        self.n = n
        self.parity = EVEN


ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def as_expr(v):
    if isinstance(v, Expr):
        return v
    if isinstance(v, (int, Fraction, float, complex)):
        return Const(v)
    raise ParseError(f"cannot interpret {v!r} as an expression")


def is_zero_const(e):
    return isinstance(e, Const) and not e.value


# -- folding constructors ------------------------------------------------------


def add(a, b):
    if is_zero_const(a):
        return b
    if is_zero_const(b):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def sub(a, b):
    return add(a, neg(b))


def mul(a, b):
    if is_zero_const(a) or is_zero_const(b):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if isinstance(a, Const):
        return scalar_mul(a.value, b)
    if isinstance(b, Const):
        return scalar_mul(b.value, a)
    return Mul(a, b)


def scalar_mul(c, a):
    if isinstance(c, int):
        c = Fraction(c)
    if not c:
        return ZERO
    if c == 1:
        return a
    if isinstance(a, Const):
        return Const(c * a.value)
    if isinstance(a, ScalarMul):
        return scalar_mul(c * a.c, a.a)
    return ScalarMul(c, a)


def int_pow(a, n):
    if n == 0:
        return ONE
    if n == 1:
        return a
    if isinstance(a, Const):
        return Const(a.value**n)
    return IntPow(a, n)


def apply_fn(fn, a):
    return Apply(fn, a)


def reciprocal(a):
    return Apply("reciprocal", a)


def has_transcendental(e):
    """Whether the tree contains exp/log/sin/cos (needs an inexact field)."""
    if isinstance(e, Apply):
        return e.fn in _TRANSCENDENTAL or has_transcendental(e.a)
    return any(has_transcendental(c) for c in _children(e))


def is_polynomial(e):
    if isinstance(e, Apply):
        return False
    return all(is_polynomial(c) for c in _children(e))


def _children(e):
    if isinstance(e, (Add, Mul)):
        return (e.a, e.b)
    if isinstance(e, (Neg, ScalarMul, Apply, IntPow)):
        return (e.a,)
    return ()


def _struct_key(e):
    if isinstance(e, Const):
        return ("const", e.value)
    if isinstance(e, EvenCoord):
        return ("x", e.i)
    if isinstance(e, OddCoord):
        return ("theta", e.j)
    if isinstance(e, Add):
        return ("add", _struct_key(e.a), _struct_key(e.b))
    if isinstance(e, Mul):
        return ("mul", _struct_key(e.a), _struct_key(e.b))
    if isinstance(e, Neg):
        return ("neg", _struct_key(e.a))
    if isinstance(e, ScalarMul):
        return ("scalarmul", e.c, _struct_key(e.a))
    if isinstance(e, IntPow):
        return ("intpow", e.n, _struct_key(e.a))
    if isinstance(e, Apply):
        return (e.fn, _struct_key(e.a))
    raise ParseError(f"unknown node {e!r}")


def max_indices(e):
    """Largest even and odd coordinate indices used by the tree."""
    if isinstance(e, EvenCoord):
        return e.i, 0
    if isinstance(e, OddCoord):
        return 0, e.j
    p = q = 0
    for c in _children(e):
        cp, cq = max_indices(c)
        p = max(p, cp)
        q = max(q, cq)
    return p, q


def substitute(e, even_map, odd_map):
    """Replace coordinates by expressions (parity is re-checked on rebuild)."""
    if isinstance(e, EvenCoord):
        return even_map[e.i]
    if isinstance(e, OddCoord):
        return odd_map[e.j]
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return add(substitute(e.a, even_map, odd_map), substitute(e.b, even_map, odd_map))
    if isinstance(e, Mul):
        return mul(substitute(e.a, even_map, odd_map), substitute(e.b, even_map, odd_map))
    if isinstance(e, Neg):
        return neg(substitute(e.a, even_map, odd_map))
    if isinstance(e, ScalarMul):
        return scalar_mul(e.c, substitute(e.a, even_map, odd_map))
    if isinstance(e, Apply):
        return Apply(e.fn, substitute(e.a, even_map, odd_map))
    if isinstance(e, IntPow):
        return int_pow(substitute(e.a, even_map, odd_map), e.n)
    raise ParseError(f"unknown node {e!r}")


def shift_coords(e, dp, dq):
    """Shift all coordinate indices up, for sections on product domains."""
    if isinstance(e, EvenCoord):
        return EvenCoord(e.i + dp)
    if isinstance(e, OddCoord):
        return OddCoord(e.j + dq)
    if isinstance(e, Const):
        return e
    if isinstance(e, Add):
        return Add(shift_coords(e.a, dp, dq), shift_coords(e.b, dp, dq))
    if isinstance(e, Mul):
        return Mul(shift_coords(e.a, dp, dq), shift_coords(e.b, dp, dq))
    if isinstance(e, Neg):
        return Neg(shift_coords(e.a, dp, dq))
    if isinstance(e, ScalarMul):
        return ScalarMul(e.c, shift_coords(e.a, dp, dq))
    if isinstance(e, Apply):
        return Apply(e.fn, shift_coords(e.a, dp, dq))
    if isinstance(e, IntPow):
        return IntPow(shift_coords(e.a, dp, dq), e.n)
    raise ParseError(f"unknown node {e!r}")


# -- canonical polynomial form -------------------------------------------------


def poly_dict(e):
    """Canonical form {(even exponents, odd mask): Fraction} or None if analytic.

    Exact over rational constants; float/complex constants propagate as-is.
    The odd mask merges with the usual transposition sign, so two polynomial
    expressions are semantically equal iff their dicts are equal.
    """
    if isinstance(e, Const):
        return {} if not e.value else {((), 0): e.value}
    if isinstance(e, EvenCoord):
        return {(((e.i, 1),), 0): Fraction(1)}
    if isinstance(e, OddCoord):
        return {((), 1 << (e.j - 1)): Fraction(1)}
    if isinstance(e, Add):
        pa, pb = poly_dict(e.a), poly_dict(e.b)
        if pa is None or pb is None:
            return None
        out = dict(pa)
        for key, c in pb.items():
            v = out.get(key, 0) + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return out
    if isinstance(e, Neg):
        pa = poly_dict(e.a)
        return None if pa is None else {k: -c for k, c in pa.items()}
    if isinstance(e, ScalarMul):
        pa = poly_dict(e.a)
        if pa is None:
            return None
        return {k: e.c * c for k, c in pa.items()} if e.c else {}
    if isinstance(e, Mul):
        pa, pb = poly_dict(e.a), poly_dict(e.b)
        if pa is None or pb is None:
            return None
        return _poly_mul(pa, pb)
    if isinstance(e, IntPow):
        pa = poly_dict(e.a)
        if pa is None:
            return None
        out = {((), 0): Fraction(1)}
        for _ in range(e.n):
            out = _poly_mul(out, pa)
        return out
    if isinstance(e, Apply):
        return None
    raise ParseError(f"unknown node {e!r}")


def _poly_mul(pa, pb):
    from .algebra import merge_sign

    out = {}
    for (ea, ma), ca in pa.items():
        da = dict(ea)
        for (eb, mb), cb in pb.items():
            if ma & mb:
                continue
            sign = merge_sign(ma, mb)
            exps = dict(da)
            for i, p in eb:
                exps[i] = exps.get(i, 0) + p
            key = (tuple(sorted(exps.items())), ma | mb)
            v = out.get(key, 0) + sign * ca * cb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def polynomials_equal(e1, e2):
    p1, p2 = poly_dict(e1), poly_dict(e2)
    if p1 is None or p2 is None:
        raise ParseError("symbolic equality needs polynomial expressions")
    return p1 == p2


# -- text form ------------------------------------------------------------------
#
# expr   := ['-'] term (('+'|'-') term)*
# term   := factor ('*' factor)*
# factor := atom ('^' INT)?
# atom   := 'x'INT | 'theta'INT | NUMBER | FUNC '(' expr ')' | '(' expr ')'
# FUNC   := exp | log | sin | cos | inv
# NUMBER := INT('/'INT)? | decimal/scientific literal

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d+(?:[eE][+-]?\d+)?|\d+[eE][+-]?\d+|\d+(?:/\d+)?)"
    r"|(?P<name>[a-zA-Z_][a-zA-Z_0-9]*)"
    r"|(?P<op>[-+*^()]))"
)

_FUNC_NAMES = {"exp": "exp", "log": "log", "sin": "sin", "cos": "cos", "inv": "reciprocal"}


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            tail = text[pos:].strip()
            if not tail:
                break
            raise ParseError(f"bad token at {tail[:12]!r}")
        pos = m.end()
        if m.group("num"):
            out.append(("num", m.group("num")))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            out.append(("op", m.group("op")))
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, tokens, p, q):
        self.tokens = tokens
        self.pos = 0
        self.p = p
        self.q = q

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, found {val!r}")

    def parse(self):
        e = self.expr()
        kind, val = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {val!r}")
        return e

    def expr(self):
        kind, val = self.peek()
        negate = False
        if kind == "op" and val == "-":
            self.take()
            negate = True
        e = self.term()
        if negate:
            e = neg(e)
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                e = add(e, rhs) if val == "+" else sub(e, rhs)
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                e = mul(e, self.factor())
            else:
                return e

    def factor(self):
        e = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                raise ParseError(f"exponent must be a non-negative integer, got {val!r}")
            e = int_pow(e, int(val))
        return e

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            # decimal and scientific literals stay floats so text round-trips
            # exactly; integers and num/den literals are exact rationals
            if "." in val or "e" in val or "E" in val:
                return Const(float(val))
            return Const(Fraction(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "name":
            if val in _FUNC_NAMES:
                self.expect_op("(")
                e = self.expr()
                self.expect_op(")")
                return Apply(_FUNC_NAMES[val], e)
            m = re.fullmatch(r"x(\d+)", val)
            if m:
                i = int(m.group(1))
                if self.p is not None and not 1 <= i <= self.p:
                    raise ParseError(f"even coordinate x{i} out of range 1..{self.p}")
                return EvenCoord(i)
            m = re.fullmatch(r"theta(\d+)", val)
            if m:
                j = int(m.group(1))
                if self.q is not None and not 1 <= j <= self.q:
                    raise ParseError(f"odd coordinate theta{j} out of range 1..{self.q}")
                return OddCoord(j)
            raise ParseError(f"unknown name {val!r}")
        raise ParseError(f"unexpected token {val!r}")


def parse_expr(text, p=None, q=None):
    """Parse the expression grammar; coordinate ranges checked when p, q given."""
    return _Parser(_tokenize(text), p, q).parse()


_FUNC_TEXT = {v: k for k, v in _FUNC_NAMES.items()}

_PREC_ADD, _PREC_MUL, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def to_text(e):
    """Render to the expression grammar (parses back to the same tree semantics)."""
    return _render(e, 0)


def _render(e, ctx):
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, Fraction):
            text = str(v)
            prec = _PREC_ATOM if v.denominator == 1 and v >= 0 else _PREC_ADD
        else:
            text = repr(v)
            prec = _PREC_ATOM if not text.startswith("-") else _PREC_ADD
        return _wrap(text, prec, ctx)
    if isinstance(e, EvenCoord):
        return f"x{e.i}"
    if isinstance(e, OddCoord):
        return f"theta{e.j}"
    if isinstance(e, Add):
        text = f"{_render(e.a, _PREC_ADD)} + {_render(e.b, _PREC_ADD + 1)}"
        return _wrap(text, _PREC_ADD, ctx)
    if isinstance(e, Neg):
        text = f"-{_render(e.a, _PREC_MUL + 1)}"
        return _wrap(text, _PREC_ADD, ctx)
    if isinstance(e, Mul):
        text = f"{_render(e.a, _PREC_MUL)}*{_render(e.b, _PREC_MUL + 1)}"
        return _wrap(text, _PREC_MUL, ctx)
    if isinstance(e, ScalarMul):
        text = f"{_render(Const(e.c), _PREC_MUL)}*{_render(e.a, _PREC_MUL + 1)}"
        return _wrap(text, _PREC_MUL, ctx)
    if isinstance(e, IntPow):
        text = f"{_render(e.a, _PREC_ATOM)}^{e.n}"
        return _wrap(text, _PREC_POW, ctx)
    if isinstance(e, Apply):
        return f"{_FUNC_TEXT[e.fn]}({_render(e.a, 0)})"
    raise ParseError(f"unknown node {e!r}")


def _wrap(text, prec, ctx):
    return f"({text})" if prec < ctx else text


# -- JSON form (mirrors the AST) ------------------------------------------------


def expr_to_json(e):
    if isinstance(e, Const):
        v = e.value
        if isinstance(v, Fraction):
            return {"op": "const", "value": str(v)}
        if isinstance(v, complex):
            return {"op": "const", "value": [v.real, v.imag], "field": "complex"}
        return {"op": "const", "value": v}
    if isinstance(e, EvenCoord):
        return {"op": "x", "i": e.i}
    if isinstance(e, OddCoord):
        return {"op": "theta", "j": e.j}
    if isinstance(e, Add):
        return {"op": "add", "args": [expr_to_json(e.a), expr_to_json(e.b)]}
    if isinstance(e, Mul):
        return {"op": "mul", "args": [expr_to_json(e.a), expr_to_json(e.b)]}
    if isinstance(e, Neg):
        return {"op": "neg", "args": [expr_to_json(e.a)]}
    if isinstance(e, ScalarMul):
        return {"op": "scalarmul", "value": str(e.c) if isinstance(e.c, Fraction) else e.c,
                "args": [expr_to_json(e.a)]}
    if isinstance(e, IntPow):
        return {"op": "intpow", "n": e.n, "args": [expr_to_json(e.a)]}
    if isinstance(e, Apply):
        return {"op": e.fn, "args": [expr_to_json(e.a)]}
    raise ParseError(f"unknown node {e!r}")


def expr_from_json(obj):
    op = obj["op"]
    if op == "const":
        v = obj["value"]
        if isinstance(v, str):
            return Const(Fraction(v))
        if isinstance(v, list):
            return Const(complex(v[0], v[1]))
        return Const(v)
    if op == "x":
        return EvenCoord(obj["i"])
    if op == "theta":
        return OddCoord(obj["j"])
    args = [expr_from_json(a) for a in obj.get("args", [])]
    if op == "add":
        return Add(*args)
    if op == "mul":
        return Mul(*args)
    if op == "neg":
        return Neg(*args)
    if op == "scalarmul":
        c = obj["value"]
        return ScalarMul(Fraction(c) if isinstance(c, str) else c, args[0])
    if op == "intpow":
        return IntPow(args[0], obj["n"])
    if op in ANALYTIC_FUNCTIONS:
        return Apply(op, args[0])
    raise ParseError(f"unknown expression op {op!r}")
