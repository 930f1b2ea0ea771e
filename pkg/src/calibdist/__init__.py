"""calibdist: distance-from-calibration measures for binary probabilistic predictors.

Measures operate on an :class:`~calibdist.core.EmpiricalDistribution` of
(prediction, label) samples: expected calibration error and binned variants,
the surrogate interval calibration error, smooth calibration via linear
programming, the lower distance to calibration via primal/dual transport LPs,
and Laplace/Gaussian kernel calibration error with exact and randomized
estimators.  ``calibdist.fixtures`` carries the adversarial constructions and
brute-force oracles used to certify the inequalities between the measures.
"""

__version__ = "0.1.0"

from .binning import IntervalPartition, binned_ece, ece, uniform_partition
from .core import (
    EmpiricalDistribution,
    ReliabilityBin,
    Sample,
    SeededRng,
    make_empirical,
    reliability_bins,
    round_to_grid,
)
from .errors import (
    BadAlpha,
    BadBins,
    BadConfig,
    BadEps,
    BadLabel,
    BadStep,
    BadWidth,
    CalibrationError,
    EmptyInput,
    ModeKindMismatch,
    OutOfRange,
    SolverFailure,
    TooLarge,
)
from .fixtures import (
    FiniteProblem,
    GaussGapConfig,
    SyntheticConfig,
    dce_bruteforce,
    discontinuity_pair,
    f_eps,
    gap_pa_pair,
    gap_quadratic,
    gen_dbeta,
    gen_gauss_gap,
    induce_gamma,
    induce_gamma_exact,
    udce_bruteforce,
)
from .interval import (
    IntervalEstimatorConfig,
    rintce_exact,
    rintce_hat,
    sintce_exact,
    sintce_hat,
)
from .kernel import (
    KernelEstimatorConfig,
    KernelKind,
    kce_estimate,
    kce_estimate_squared,
    kce_exact,
    kernel_identity_check,
)
from .lowerdist import (
    CouplingSolution,
    DualSolution,
    Grid,
    ldce,
    ldce_both_forms,
    ldce_dual_solution,
    ldce_primal_solution,
)
from .smooth import LinearProgramSolution, WeightVector, smce, smce_full_pairwise
from .cli import CalibrationReport

__all__ = [
    "__version__",
    "CalibrationReport",
    "EmpiricalDistribution", "ReliabilityBin", "Sample", "SeededRng",
    "make_empirical", "reliability_bins", "round_to_grid",
    "IntervalPartition", "binned_ece", "ece", "uniform_partition",
    "IntervalEstimatorConfig", "rintce_exact", "rintce_hat", "sintce_exact", "sintce_hat",
    "LinearProgramSolution", "WeightVector", "smce", "smce_full_pairwise",
    "CouplingSolution", "DualSolution", "Grid",
    "ldce", "ldce_both_forms", "ldce_dual_solution", "ldce_primal_solution",
    "KernelEstimatorConfig", "KernelKind",
    "kce_estimate", "kce_estimate_squared", "kce_exact", "kernel_identity_check",
    "FiniteProblem", "GaussGapConfig", "SyntheticConfig",
    "dce_bruteforce", "udce_bruteforce", "induce_gamma", "induce_gamma_exact",
    "f_eps", "gap_pa_pair", "gap_quadratic", "discontinuity_pair",
    "gen_dbeta", "gen_gauss_gap",
    "CalibrationError", "EmptyInput", "OutOfRange", "BadLabel", "BadStep",
    "BadBins", "BadWidth", "BadEps", "BadAlpha", "BadConfig",
    "ModeKindMismatch", "TooLarge", "SolverFailure",
]
