"""Certified bounds on tensor norms and on the Hilbert-space factorization
constant Gamma of multilinear operators between finite-dimensional l_p spaces.

Every reported number is one side of a certified interval: lower bounds come
with an explicit witness (a PSD-checked Kwapien witness, a dual functional or a
maximizing point), upper bounds with an explicit construction (a decomposition
or a closed-form route).
"""

from types import ModuleType as _ModuleType

from ._version import __version__
from .certificates import (
    CertifiedInterval,
    GammaCertificate,
    KwapienWitness,
    check_domination,
    gamma_interval,
    lower_bound_from_witness,
    search_witness,
    upper_bound_composition,
    upper_bound_hilbert_domain,
    upper_bound_hs,
    upper_bound_product,
    upper_bound_rank_one,
    upper_bound_rank_one_sum,
    upper_bound_routing,
)
from .config import override, settings
from .errors import (
    BudgetError,
    CertificateRefused,
    GammaFactorError,
    InconsistencyError,
    InputError,
    SearchError,
    UnsupportedError,
)
from .gamma_norm import (
    GammaRepresentation,
    assemble,
    gamma_lower_elementary,
    gamma_lower_via_operator,
    gamma_upper,
    greedy_split,
    pairing,
)
from .numerics import SeededRng, SymmetricMatrix, jacobi_eigh, min_eigenvalue, multistart_maximize, svd
from .operators import (
    MultilinearOperator,
    TensorSpace,
    canonical_map,
    evaluate,
    fix_coordinates,
    hs_norm,
    identity,
    inner_product,
    linear_operator,
    operator_norm_bounds,
    postcompose_linear,
    precompose_linear,
    product_of_linear,
    rank_one,
    scalar_form,
)
from .polynomials import (
    HomogeneousPolynomial,
    PolynomialWitness,
    associated_operator,
    check_poly_domination,
    compose_poly,
    evaluate_poly,
    poly_composition_upper,
    poly_gamma_interval,
    poly_lower_bound,
    poly_search_witness,
    sym_projective_bounds,
    symmetrize,
)
from .spaces import SpaceSpec, dual_space, euclidean, lp_norm, to_l2_constant
from .tensors import (
    DecomposablePoint,
    DenseTensor,
    NormInterval,
    hilbert_crossnorm,
    injective_norm_bounds,
    pi_distance_bounds,
    projective_norm_bounds,
)

__all__ = sorted(n for n, v in globals().items() if not n.startswith("_") and not isinstance(v, _ModuleType))
