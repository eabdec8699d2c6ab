"""Log-scale download indexes and rank statistics for author/paper corpora."""

from .corpus import (
    REPORT_COLUMNS,
    AuthorProfile,
    CleanResult,
    CorpusFormatError,
    IndexReport,
    PaperEntry,
    SanityResult,
    SanityStatus,
    build_report,
    build_reports,
    career_length,
    clean,
    cross_section,
    open_text,
    parse_corpus,
    parse_totals,
    read_reports,
    sanity_check,
    with_declared_totals,
    write_corpus,
    write_reports,
    write_totals,
)
from .diagnostics import (
    YONG_CONSTANT,
    DegenerateCorpusError,
    DiagnosticSet,
    UndefinedDiagnosticError,
    diagnostic_set,
    gamma_heuristic,
    omega_ratio,
    time_normalized,
    v_quantity,
    w_ratio,
    yong_estimate,
)
from .indexes import (
    FLOOR_TOL,
    DownloadVector,
    GammaConfig,
    KResult,
    KappaResult,
    composite_index,
    g_index,
    guarded_floor,
    h_index,
    k_index,
    k_star,
    kappa_index,
    kappa_star,
    log_counts,
)
from .stats import (
    DegenerateDataError,
    DensityCurve,
    FitConvergenceError,
    FitResult,
    GaussianFit,
    NoInflectionError,
    RankTable,
    SingularDesignError,
    SummarySix,
    fit_gaussian,
    fit_rank_curve,
    inflection_point,
    inflection_points,
    kde,
    ols,
    quantile,
    rank_descending,
    rank_table,
    summary_six,
)
from .synth import SplitMix64, SynthParams, default_params, generate, normal_icdf

__version__ = "0.1.0"

__all__ = [
    "AuthorProfile",
    "CleanResult",
    "CorpusFormatError",
    "DegenerateCorpusError",
    "DegenerateDataError",
    "DensityCurve",
    "DiagnosticSet",
    "DownloadVector",
    "FLOOR_TOL",
    "FitConvergenceError",
    "FitResult",
    "GammaConfig",
    "GaussianFit",
    "IndexReport",
    "KResult",
    "KappaResult",
    "NoInflectionError",
    "PaperEntry",
    "REPORT_COLUMNS",
    "RankTable",
    "SanityResult",
    "SanityStatus",
    "SingularDesignError",
    "SplitMix64",
    "SummarySix",
    "SynthParams",
    "UndefinedDiagnosticError",
    "YONG_CONSTANT",
    "build_report",
    "build_reports",
    "career_length",
    "clean",
    "composite_index",
    "cross_section",
    "default_params",
    "diagnostic_set",
    "fit_gaussian",
    "fit_rank_curve",
    "g_index",
    "gamma_heuristic",
    "generate",
    "guarded_floor",
    "h_index",
    "inflection_point",
    "inflection_points",
    "k_index",
    "k_star",
    "kappa_index",
    "kappa_star",
    "kde",
    "log_counts",
    "normal_icdf",
    "ols",
    "open_text",
    "omega_ratio",
    "parse_corpus",
    "parse_totals",
    "quantile",
    "rank_descending",
    "rank_table",
    "read_reports",
    "sanity_check",
    "summary_six",
    "time_normalized",
    "v_quantity",
    "w_ratio",
    "with_declared_totals",
    "write_corpus",
    "write_reports",
    "write_totals",
    "yong_estimate",
]
