"""Density matrices, Riesz and generalized density matrices, and entropy
operators for finite-dimensional non-Hermitian models."""

from .biortho import (
    BiorthogonalSystem,
    DeformationOp,
    basis_expand,
    deformation,
    gdm_duals,
    has_property_pi,
    intertwines,
    resolution,
    riesz_pair_from,
    span_system,
)
from .density import (
    DensityMatrix,
    EntropyOperator,
    GeneralizedDM,
    Grade,
    RieszDM,
    convex_combine,
    deformed_observable,
    dm_new,
    dump_state,
    entropy_operator,
    entropy_trace,
    functional_eval,
    gdm_check,
    gdm_from_pi,
    is_pure,
    load_state,
    pure_state,
    purity,
    rdm_new,
    riesz_pure_state,
)
from .errors import NHDMError
from .matcore import DEFAULT_TOL, Spectrum, Tolerances, eig, eigvals, mat_function, mat_inverse

__version__ = "0.1.0"
