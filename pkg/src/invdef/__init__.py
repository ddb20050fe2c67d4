"""invdef: exact equivariant deformation calculus.

Computes tangent spaces and universal invariant deformations of G-stable
subschemes of a representation, over exact rational arithmetic: Groebner
bases and syzygies, Reynolds operators via the Casimir element, the
obstruction-iteration main loop, and one-parameter-subgroup flat limits.
"""

from .ring import (
    VariableSet,
    Polynomial,
    MonomialOrder,
    GREVLEX,
    LEX,
    weighted_order,
    elimination_order,
    poly_parse,
    poly_print,
    gm_weight,
    canonicalize_generator,
    tensor_vars,
)
from .matrix import PolyMatrix, FreeModuleElement, matrix_mul
from .groebner import (
    GroebnerBasis,
    ModuleGB,
    buchberger,
    module_gb,
    normal_form,
    syzygies,
    ideal_membership,
    ideal_equal,
    ideal_intersection,
    krull_dimension,
    weighted_hilbert_series,
    lift_through_module,
    UnitIdeal,
)
from .action import (
    GroupAction,
    RepresentationMatrix,
    NotStable,
    reynolds,
    reynolds_twisted,
    rep_on_subspace,
    g_closure,
    is_equivariant,
    is_invariant_poly,
    closure_from_generators,
)
from .deform import (
    ProblemSpec,
    Presentation,
    TangentBasis,
    DeformationState,
    UniversalDeformation,
    build_presentation,
    covariant_basis,
    tangent_space,
    first_order,
    obstruction_step,
    stop_check,
    run,
    verify,
    fiber_over_zero,
    SpecValidationError,
    ResourceCapError,
    InternalInvariantError,
)
from .degeneration import OneParameterWeights, flat_limit, psg_column_weights

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
