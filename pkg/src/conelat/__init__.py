"""Quasi-lattice operations on finite-dimensional ordered Banach spaces."""
from .cones import (
    Cone,
    HalfLorentzCone,
    LorentzCone,
    PolyhedralCone,
    PolyNonnegCone,
    StandardCone,
    WeightedLorentzCone,
    ZeroCone,
    cone_from_dict,
)
from .lattice import ando_decompose, identity_suite, neg_part, pos_part, quasi_abs, quasi_inf
from .metrics import (
    Flavor,
    PropertyFlavor,
    conormality_constant_estimate,
    conormality_solve,
    dual_normality_spotcheck,
    normality_check,
    regularity_classify,
    sample_normality_items,
)
from .norms import NormSpec
from .operators import (
    OperatorMatrix,
    OperatorNormReport,
    absolute_monotonicity_experiment,
    normality_transfer_check,
    operator_norm,
    operator_positive,
    positively_attained_check,
    random_positive_operator,
    rank_one,
    robinson_norm,
)
from .solver import (
    GridSpec,
    NotAQuasiLatticeError,
    QuasiSupResult,
    SolverOptions,
    Status,
    brute_force_quasi_sup,
    is_minimal_upper_bound,
    quasi_sup,
    sigma,
)
from .spaces import (
    OrderedSpace,
    four_ray_space,
    half_lorentz_space,
    lorentz_space,
    order_leq,
    polynomial_space,
    space_from_dict,
    standard_space,
    weighted_space,
)

__version__ = "0.1.0"
