"""Time-varying Granger and partial-correlation networks."""

from ._tvnet import (
    NumericError,
    benchmark,
    classification_metrics,
    default_bandwidths,
    estimate,
    factor_adjust,
    select_var_order,
    simulate,
)

__all__ = [
    "NumericError",
    "benchmark",
    "classification_metrics",
    "default_bandwidths",
    "estimate",
    "factor_adjust",
    "select_var_order",
    "simulate",
]
