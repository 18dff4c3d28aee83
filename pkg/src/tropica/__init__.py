"""tropica: min-plus junction dynamics and their closed-form growth rates.

A library for the two-ring priority-junction traffic system: min-plus
scalar and matrix algebra with Kleene star closure, configuration and
derived quantities, the closed-form additive eigenvalue set across all
density phases with explicit eigenvectors, a discrete-event simulator,
independent verification oracles, and a CLI for fundamental-diagram
sweeps.
"""

from .dynamics import (
    GrowthSummary,
    StateVector,
    Trajectory,
    WindowTooLarge,
    growth_rate,
    linearity_check,
    simulate,
    step,
    write_trajectory_csv,
)
from .minplus import (
    EPSILON,
    UNIT,
    MinPlusMatrix,
    NonPositiveCircuit,
    affine_solve,
    check_circuits_positive,
    half,
    kleene_star,
    mat_mul,
    mat_oplus,
    oplus,
    otimes,
    residuate,
    scale,
)
from .model import (
    ConfigError,
    DensityOutOfRange,
    DerivedParams,
    InvalidConfig,
    TrafficConfig,
    allocate,
    derive,
    parse_config,
    serialize_config,
    validate,
)
from .oracle import (
    NoConvergence,
    RootSet,
    WrongSize,
    ev_ss_coincide_base,
    lambda_bound_check,
    scalar_roots,
    star_fixed_point,
)
from .spectral import (
    CharacteristicPieces,
    FullEigenpair,
    HypothesisViolated,
    LambdaNotPositive,
    ReducedEigenpair,
    Regime,
    RegimeNotApplicable,
    Region,
    RNotApplicable,
    UniquenessViolated,
    ZVector,
    applicable_regimes,
    assert_unique_positive,
    characteristic,
    characteristic_pieces,
    classify_region,
    eigen_set,
    extend_full,
    lambda_asymptotic,
    lambda_nonneg,
    reduced_eigenvector,
    regime_lambda,
    region_intervals,
    residual_full,
    residual_reduced,
    residual_simplified,
    residual_zshift,
    z_transform,
)

__version__ = "0.1.0"
