"""Mixed Poisson random sums and ideal-metric distances to their limits.

The package simulates sums of i.i.d. terms whose count is Poisson with
a random intensity, computes Zolotarev-type metric distances between
the normalized sums and their limiting laws, and evaluates the
closed-form convergence-rate bounds those distances obey.  The harness
module ties the three together into reproducible verification sweeps.
"""

from .bounds import (
    BoundReport,
    corollary2_bound,
    example1_bound,
    gg_bound,
    lemma5_bound,
    moment_ratio,
    negative_binomial_bound,
    theorem1_bound,
)
from .distributions import (
    DiscreteCountLaw,
    ExponentialLaw,
    GammaDistribution,
    GammaLaw,
    GeneralizedGammaDistribution,
    GeneralizedGammaLaw,
    PointMassLaw,
    gamma_cdf,
    gamma_quantile,
    gg_cdf,
    gg_moment,
    gg_quantile,
    gg_sample,
    mixed_poisson_sample,
    negative_binomial_pmf,
)
from .harness import (
    DEFAULT_VERIFY_SEED,
    PRESET_NAMES,
    ExperimentConfig,
    ExperimentRow,
    InsufficientDataError,
    emit,
    fit_decay_slope,
    load_config,
    parse_config,
    parse_rows_json,
    preset_config,
    rows_to_csv,
    rows_to_json,
    run_experiment,
    run_preset,
    verify_presets,
)
from .random_sums import (
    MixingModel,
    RandomSumModel,
    SummandLaw,
    draw_batch,
    sample_batch,
    sample_normalized,
    sample_sum,
)
from .zeta_metrics import (
    AnalyticDistribution,
    DiscreteDistribution,
    EmpiricalDistribution,
    MeanMismatchError,
    PointMass,
    ZetaEstimate,
    ZetaOrder,
    default_t_grid,
    lemma4_upper_bound,
    zeta1,
    zeta2,
    zeta_s_lower_bound,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticDistribution",
    "BoundReport",
    "DEFAULT_VERIFY_SEED",
    "DiscreteCountLaw",
    "DiscreteDistribution",
    "EmpiricalDistribution",
    "ExperimentConfig",
    "ExperimentRow",
    "ExponentialLaw",
    "GammaDistribution",
    "GammaLaw",
    "GeneralizedGammaDistribution",
    "GeneralizedGammaLaw",
    "InsufficientDataError",
    "MeanMismatchError",
    "MixingModel",
    "PRESET_NAMES",
    "PointMass",
    "PointMassLaw",
    "RandomSumModel",
    "SummandLaw",
    "ZetaEstimate",
    "ZetaOrder",
    "corollary2_bound",
    "default_t_grid",
    "draw_batch",
    "emit",
    "example1_bound",
    "fit_decay_slope",
    "gamma_cdf",
    "gamma_quantile",
    "gg_bound",
    "gg_cdf",
    "gg_moment",
    "gg_quantile",
    "gg_sample",
    "lemma4_upper_bound",
    "lemma5_bound",
    "load_config",
    "mixed_poisson_sample",
    "moment_ratio",
    "negative_binomial_bound",
    "negative_binomial_pmf",
    "parse_config",
    "parse_rows_json",
    "preset_config",
    "rows_to_csv",
    "rows_to_json",
    "run_experiment",
    "run_preset",
    "sample_batch",
    "sample_normalized",
    "sample_sum",
    "theorem1_bound",
    "verify_presets",
    "zeta1",
    "zeta2",
    "zeta_s_lower_bound",
]
