from gof.metrics import (
    GofReport,
    PercentileBias,
    ad_statistic,
    evaluate,
    information_criteria,
    ks_statistic,
    percentile_bias,
)

__all__ = [
    "GofReport",
    "PercentileBias",
    "ad_statistic",
    "evaluate",
    "information_criteria",
    "ks_statistic",
    "percentile_bias",
]
