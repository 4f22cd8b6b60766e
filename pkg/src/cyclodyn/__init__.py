"""Exact semigroup dynamics over cyclotomic fields.

Heights, houses and canonical heights with rigorous error radii,
no-common-zero certificates with explicit size constants, and
desk-scale orbit searches.
"""

from .canonical import (
    DriftBound,
    SplitMultilinearForm,
    canonical_height_map,
    canonical_height_semigroup,
    canonical_height_word,
    collision_bound_experiment,
    drift_bound,
    preperiodic_by_height,
    split_form_eval,
    split_form_zero_search,
)
from .certificates import (
    Certificate,
    EffectiveConstants,
    NoCertificate,
    effective_constants,
    find_certificate,
    verify_certificate,
)
from .config import ConfigError, SystemConfig, parse_config
from .cyclotomic import CyclotomicElement, CyclotomicError, euler_phi, ideal_norm, units
from .heights import (
    AffinePoint,
    HeightEstimate,
    RationalPlace,
    house,
    integrality_scaler,
    poly_sup_norm,
    rational_abs,
    weil_height,
)
from .intervals import ComplexBox, RigorousContext
from .morphisms import (
    AffineMorphism,
    MonomialForm,
    ProjectiveLift,
    compose,
    conjugate_map,
    is_root_of_unity,
    is_unitary_monomial_form,
    nonconstant_term_count,
)
from .orbits import (
    Collision,
    CyclotomicIntegerBox,
    HypothesisError,
    OrbitCapExceeded,
    OrbitLevels,
    RationalBox,
    SemigroupSystem,
    Word,
    backward_house_bound,
    collision_search,
    growth_check,
    orbit_levels,
    preperiodicity_search,
    relation_house_bound,
    sigma_relation_search,
)
from .parsing import PolyParseError, parse_element, parse_point, parse_polynomial
from .polynomials import LaurentPoly, MultiPoly

__version__ = "0.1.0"
