"""Analytics and small-N Monte Carlo laboratory for spherical mixed p-spin models."""
from .conditioning import (
    BandGeometry,
    ConditioningEvent,
    FPConditioning,
    HessianDecomposition,
    SphereReduction,
    band_kernel,
    covariance_csv,
    derivative_covariances,
    fp_conditioning,
    hessian_decomposition,
    reduce_to_sphere,
    schur_condition,
)
from .errors import (
    BadInputError,
    CapacityExceededError,
    KMismatchError,
    MixtureError,
    NotBracketedError,
    RegimeMismatchError,
    SingularBlockError,
    SingularMatrixError,
    SolverFailedError,
)
from .franz_parisi import (
    FPQuery,
    FPResult,
    FPTerms,
    fp_high,
    fp_low,
    fp_low_objective,
    fp_potential,
    j_interval,
    tau,
)
from .landscape import (
    GroundStateCurve,
    chain_bound,
    fprime_identity,
    ground_state_curve,
    ground_state_point,
    identity_esrs,
    omega,
    theta,
    theta_pure,
    theta_surface_csv,
)
from .mclab import (
    ComplexityEstimate,
    CriticalPointRecord,
    FieldSample,
    GibbsRun,
    MCConfig,
    OverlapHistogram,
    chain_constraint_set,
    dump_samples,
    empirical_complexity,
    exact_conditional_sampler,
    find_critical_points,
    gibbs_mcmc,
    load_samples,
    overlap_statistics,
    sample_field,
    stream_rng,
)
from .mixtures import Mixture, SigmaMatrix, pure
from .rsb import (
    OrderParameter,
    SolverConfig,
    ZeroTempOrder,
    beta_c,
    cs_minimize,
    cs_value,
    pushforward_check,
    rs_value,
    zt_minimize,
    zt_value,
)

__all__ = [
    "BadInputError",
    "BandGeometry",
    "CapacityExceededError",
    "ComplexityEstimate",
    "ConditioningEvent",
    "CriticalPointRecord",
    "FPConditioning",
    "FPQuery",
    "FPResult",
    "FPTerms",
    "FieldSample",
    "GibbsRun",
    "GroundStateCurve",
    "HessianDecomposition",
    "KMismatchError",
    "MCConfig",
    "Mixture",
    "MixtureError",
    "NotBracketedError",
    "OrderParameter",
    "OverlapHistogram",
    "RegimeMismatchError",
    "SigmaMatrix",
    "SingularBlockError",
    "SingularMatrixError",
    "SolverConfig",
    "SolverFailedError",
    "SphereReduction",
    "ZeroTempOrder",
    "band_kernel",
    "beta_c",
    "chain_bound",
    "chain_constraint_set",
    "covariance_csv",
    "cs_minimize",
    "cs_value",
    "derivative_covariances",
    "dump_samples",
    "empirical_complexity",
    "exact_conditional_sampler",
    "find_critical_points",
    "fp_conditioning",
    "fp_high",
    "fp_low",
    "fp_low_objective",
    "fp_potential",
    "fprime_identity",
    "gibbs_mcmc",
    "ground_state_curve",
    "ground_state_point",
    "hessian_decomposition",
    "identity_esrs",
    "j_interval",
    "load_samples",
    "omega",
    "overlap_statistics",
    "pure",
    "pushforward_check",
    "reduce_to_sphere",
    "rs_value",
    "sample_field",
    "schur_condition",
    "stream_rng",
    "tau",
    "theta",
    "theta_pure",
    "theta_surface_csv",
    "zt_minimize",
    "zt_value",
]
