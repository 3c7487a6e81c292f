"""Change point detection for oscillatory time series.

Within-segment frequency content is modeled by sparse Bayesian variable
selection over a sine/cosine dictionary: each effect picks one frequency whose
paired coefficients carry a bivariate Gaussian slab. The fitted evidence lower
bound scores candidate segments; binary segmentation with an optimistic
search locates change points, and a description-length criterion picks the
final partition. Works on single series or panels that share change points.
"""

from .errors import (
    ConfigError,
    DegenerateFrequencyError,
    InputError,
    NumericalError,
    OscsegError,
    SegmentTooShortError,
    SplitInfeasibleError,
)
from .fourier import (
    DesignPair,
    FrequencyGrid,
    Periodogram,
    build_grid_equal,
    build_grid_periodogram,
    continuity_compatible_frequencies,
    design,
    gram_identity,
    lagrange_cos_sum,
    lagrange_sin_sum,
    periodogram,
    window_gram,
)
from .bayes_linear import (
    GaussianPosterior,
    log_marginal,
    log_marginal_null,
    posterior,
)
from .susie import (
    SegmentSummary,
    SerPosterior,
    SuffStats,
    SusieFit,
    elbo,
    fit_from_stats,
    segment_score,
    ser_fit,
    stats_from_design,
    summarize,
    susie_fit,
)
from .segment import (
    CandidateScore,
    DetectionConfig,
    DetectionResult,
    GainProfile,
    PanelSeries,
    Partition,
    SegmentCache,
    SplitRecord,
    as_panel,
    auto_select_ne,
    binary_segmentation,
    build_grid,
    detect,
    full_search,
    gain,
    interval_score,
    mdl,
    optimistic_search,
    select_partition,
)
from .metrics import EvalReport, bias, coverage, evaluate, hausdorff, rmse
from .simgen import (
    BASELINE_COMPONENTS,
    Component,
    OscSpec,
    SegmentSpec,
    SimTruth,
    gen_oscillation,
    gen_piecewise_ar,
    gen_scenario1,
    gen_scenario2,
    gen_scenario3,
    gen_tvar,
    gen_white_noise,
    mean_from_spec,
)

__version__ = "0.1.0"

__all__ = [
    "OscsegError", "InputError", "ConfigError", "NumericalError",
    "DegenerateFrequencyError", "SegmentTooShortError", "SplitInfeasibleError",
    "FrequencyGrid", "DesignPair", "Periodogram", "build_grid_equal",
    "build_grid_periodogram", "periodogram", "design", "gram_identity",
    "lagrange_cos_sum", "lagrange_sin_sum", "window_gram",
    "continuity_compatible_frequencies",
    "GaussianPosterior", "posterior", "log_marginal", "log_marginal_null",
    "SuffStats", "SerPosterior", "SusieFit", "SegmentSummary", "ser_fit",
    "susie_fit", "fit_from_stats", "stats_from_design", "elbo",
    "segment_score", "summarize",
    "PanelSeries", "Partition", "GainProfile", "SplitRecord", "CandidateScore",
    "DetectionConfig", "DetectionResult", "SegmentCache", "as_panel",
    "build_grid", "interval_score", "gain", "optimistic_search", "full_search",
    "binary_segmentation", "mdl", "select_partition", "auto_select_ne",
    "detect",
    "EvalReport", "coverage", "hausdorff", "bias", "rmse", "evaluate",
    "Component", "SegmentSpec", "OscSpec", "SimTruth", "BASELINE_COMPONENTS",
    "mean_from_spec", "gen_oscillation", "gen_scenario1", "gen_scenario2",
    "gen_scenario3", "gen_piecewise_ar", "gen_tvar", "gen_white_noise",
    "__version__",
]
