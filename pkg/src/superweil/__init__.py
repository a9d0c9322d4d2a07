"""Supercommutative Weil algebras and higher-order forward differential calculus.

The package builds finite-dimensional supercommutative local algebras, puts
algebra-valued points on superdomains, evaluates symbolic superfunctions at
those points through truncated Taylor expansion, and layers differential
calculus (tangents, derivations, point-supported distributions, tensor
transitivity) plus a checker for coefficient series that claim to come from
an actual superdomain morphism.
"""

from .algebra import (
    AlgebraElement,
    AlgebraMorphism,
    Monomial,
    SuperWeilAlgebra,
    apply_morphism,
    body,
    compose_morphisms,
    height,
    identity_morphism,
    invert,
    join,
    make_dual_numbers,
    make_grassmann,
    make_morphism,
    make_super_dual_numbers,
    make_truncated,
    parity,
    quotient,
    scalar_projection,
    soul,
    tensor,
    width,
)
from .apoints import (
    APoint,
    DomainMorphism,
    apply_morphism_to_point,
    base_point,
    compose_domain_morphisms,
    eval_ast,
    eval_taylor,
    identity_domain_morphism,
    make_apoint,
    make_domain_morphism,
    product_domain,
    product_point,
    pushforward_algebra,
    split_point,
    trivial_point,
)
from .calculus import (
    Derivation,
    Distribution,
    TangentVector,
    check_transitivity,
    derivation_apply,
    finite_difference_tangent,
    functional_through_point,
    make_derivation,
    make_distribution,
    pair_distribution,
    point_to_tangent,
    tangent_eval,
    tangent_to_point,
    tautological_point,
    taylor_coefficient_map,
    transitivity_point,
)
from .errors import (
    AlgebraError,
    EvaluationError,
    ParityError,
    ParseError,
    RegionError,
    SuperWeilError,
)
from .expr import Expr, parse_expr, to_text
from .fields import COMPLEX, RATIONAL, REAL, field_by_name
from .nattrans import (
    CheckReport,
    TruncatedFormalSeries,
    apply_series,
    check_comes_from_morphism,
    series_from_morphism,
)
from .serialize import Workspace
from .superfunc import (
    Section,
    SuperDomain,
    components_to_expr,
    d_even,
    d_odd,
    eval_classical,
    normalize_components,
    section,
    super_derive,
)

__version__ = "0.1.0"
