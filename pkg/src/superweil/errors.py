"""Exception types shared across the package."""


class SuperWeilError(Exception):
    """Base class for all library errors."""


class AlgebraError(SuperWeilError):
    """Invalid algebra construction, mismatched algebras, or bad element op."""


class ParityError(SuperWeilError):
    """A parity constraint was violated."""


class RegionError(SuperWeilError):
    """A base point left the open region of a superdomain."""


class EvaluationError(SuperWeilError):
    """An analytic function was evaluated outside its domain or on an exact field."""


class ParseError(SuperWeilError):
    """Malformed expression, element, or mini-language input."""
