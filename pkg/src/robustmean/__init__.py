"""Robust univariate mean estimation with breakdown and deviation diagnostics.

Estimators (winsorized mean, Catoni, median-of-means, two-sample trimmed
mean), closed-form deviation bounds, contamination models and Monte Carlo
harnesses that check them against each other.
"""

from .bounds import (
    BoundParams,
    BoundResult,
    Validity,
    bernstein_tail,
    check_validity,
    default_eps_star,
    delta_star,
    minimal_eps_star,
    rbp_theoretical,
    subgaussian_radius,
    theorem41_bound,
    winsorized_deviation_bound,
)
from .contamination import (
    ContaminationSpec,
    DistributionSpec,
    contaminate,
    draw,
    escalate,
    lm_adversary,
    mom_adversary,
)
from .estimators import (
    CatoniParams,
    DegenerateScaleError,
    EstimatorSpec,
    IterationLimitError,
    MomParams,
    Sample,
    TrimParams,
    WinsorizeParams,
    catoni_mean,
    catoni_psi,
    lm_trimmed_mean,
    mad,
    mean,
    median,
    mom,
    outlyingness,
    phi,
    winsorize_bounds,
    winsorized_fit,
    winsorized_mean,
)
from .experiments import (
    BreakdownReport,
    DeviationReport,
    EfficiencyReport,
    InsufficientTailError,
    breakdown_probe,
    deviation_experiment,
    efficiency_comparison,
    empirical_rbp,
    lemma41_check,
    tail_fit,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "BoundResult",
    "Validity",
    "bernstein_tail",
    "check_validity",
    "default_eps_star",
    "delta_star",
    "minimal_eps_star",
    "rbp_theoretical",
    "subgaussian_radius",
    "theorem41_bound",
    "winsorized_deviation_bound",
    "ContaminationSpec",
    "DistributionSpec",
    "contaminate",
    "draw",
    "escalate",
    "lm_adversary",
    "mom_adversary",
    "CatoniParams",
    "DegenerateScaleError",
    "EstimatorSpec",
    "IterationLimitError",
    "MomParams",
    "Sample",
    "TrimParams",
    "WinsorizeParams",
    "catoni_mean",
    "catoni_psi",
    "lm_trimmed_mean",
    "mad",
    "mean",
    "median",
    "mom",
    "outlyingness",
    "phi",
    "winsorize_bounds",
    "winsorized_fit",
    "winsorized_mean",
    "BreakdownReport",
    "DeviationReport",
    "EfficiencyReport",
    "InsufficientTailError",
    "breakdown_probe",
    "deviation_experiment",
    "efficiency_comparison",
    "empirical_rbp",
    "lemma41_check",
    "tail_fit",
]
