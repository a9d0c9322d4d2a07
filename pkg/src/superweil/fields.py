"""Scalar fields backing all coefficients.

Three instantiations: exact rationals (``RATIONAL``), double-precision reals
(``REAL``), and complex doubles (``COMPLEX``).  Ring/field axioms hold exactly
on the rational field and within the usual rounding on the other two.
Transcendental primitives (exp, log, sin, cos) exist only on the inexact
fields; reciprocals and integer powers work everywhere.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from math import factorial

from .errors import EvaluationError, ParseError

TRANSCENDENTAL_FUNCTIONS = ("exp", "log", "sin", "cos")
ANALYTIC_FUNCTIONS = TRANSCENDENTAL_FUNCTIONS + ("reciprocal",)


class Field:
    """One coefficient field.  Use the module singletons, not the constructor."""

    name: str
    exact: bool
    transcendental: bool

    def __repr__(self):
        return f"<field {self.name}>"

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def coerce(self, value):
        raise NotImplementedError

    def parse(self, text):
        raise NotImplementedError

    def to_json(self, value):
        raise NotImplementedError

    def from_json(self, value):
        return self.coerce(value)

    def is_zero(self, value):
        return not value

    def norm(self, value):
        """Magnitude as a float, used for tolerance checks and pivoting."""
        return float(abs(value))

    def in_interval(self, value, lo, hi):
        """Open-interval membership; complex values are tested by modulus."""
        v = abs(value) if isinstance(value, complex) else value
        if lo is not None and not v > lo:
            return False
        if hi is not None and not v < hi:
            return False
        return True

    def negligible(self, value, scale=1.0):
        """Zero test used by row reduction (exact on exact fields)."""
        if self.exact:
            return not value
        return self.norm(value) <= 1e-12 * max(1.0, scale)

    def function_value(self, fn, x):
        """Value of a transcendental primitive at a field scalar."""
        raise EvaluationError(
            f"{fn} requires an inexact scalar field, not {self.name}"
        )

    def nth_derivative(self, fn, n, x):
        """n-th derivative of an analytic primitive at x.

        Closed forms only; reciprocal is rational so it works on every field.
        """
        if fn == "reciprocal":
            if self.is_zero(x):
                raise EvaluationError("reciprocal evaluated at zero body")
            return self.coerce((-1) ** n * factorial(n)) * x ** (-(n + 1))
        if fn == "exp":
            return self.function_value("exp", x)
        if fn == "log":
            if n == 0:
                return self.function_value("log", x)
            return self.coerce((-1) ** (n - 1) * factorial(n - 1)) * x ** (-n)
        if fn == "sin":
            k = n % 4
            v = self.function_value("sin" if k % 2 == 0 else "cos", x)
            return -v if k in (2, 3) else v
        if fn == "cos":
            k = n % 4
            v = self.function_value("cos" if k % 2 == 0 else "sin", x)
            return -v if k in (1, 2) else v
        raise EvaluationError(f"unknown analytic function {fn!r}")


class RationalField(Field):
    name = "rational"
    exact = True
    transcendental = False

    def coerce(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, float):
            # exact binary value of the float; decimal strings go via parse()
            return Fraction(value)
        raise ParseError(f"cannot coerce {value!r} to a rational scalar")

    def parse(self, text):
        try:
            return Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad rational literal {text!r}") from exc

    def to_json(self, value):
        return str(value)

    def from_json(self, value):
        if isinstance(value, str):
            return self.parse(value)
        return self.coerce(value)


class RealField(Field):
    name = "real"
    exact = False
    transcendental = True

    def coerce(self, value):
        if isinstance(value, complex):
            raise ParseError("cannot coerce a complex scalar to a real one")
        return float(value)

    def parse(self, text):
        try:
            return float(Fraction(text.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad real literal {text!r}") from exc

    def to_json(self, value):
        return value

    def function_value(self, fn, x):
        if fn == "log" and x <= 0.0:
            raise EvaluationError(f"log of non-positive body {x!r}")
        return getattr(math, fn)(x)


class ComplexField(Field):
    name = "complex"
    exact = False
    transcendental = True

    def coerce(self, value):
        return complex(value)

    def parse(self, text):
        text = text.strip()
        try:
            return complex(text)
        except ValueError:
            pass
        try:
            return complex(float(Fraction(text)))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad complex literal {text!r}") from exc

    def to_json(self, value):
        return [value.real, value.imag]

    def from_json(self, value):
        if isinstance(value, list):
            return complex(value[0], value[1])
        return self.coerce(value)

    def function_value(self, fn, x):
        if fn == "log" and x == 0:
            raise EvaluationError("log of zero body")
        return getattr(cmath, fn)(x)


RATIONAL = RationalField()
REAL = RealField()
COMPLEX = ComplexField()

FIELDS = {f.name: f for f in (RATIONAL, REAL, COMPLEX)}


def field_by_name(name):
    try:
        return FIELDS[name]
    except KeyError:
        raise ParseError(f"unknown scalar field {name!r}") from None


def infer_field(values):
    """Pick the smallest field containing the given plain scalars."""
    field = RATIONAL
    for v in values:
        if isinstance(v, complex):
            return COMPLEX
        if isinstance(v, float):
            field = REAL
    return field
