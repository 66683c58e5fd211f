"""Truncated singular BSDE solver for exponential utility maximization with default."""

from ._singbsde import (
    ConvergenceError,
    RegressionError,
    ValidationError,
    g_solution,
    normalize_config,
    oracle_linear_bsde,
    oracle_no_claim,
    oracle_put_price,
    reference_config,
    selftest,
    singular_ode_state,
    solve,
    survival_probability,
    sweep,
    value_function,
)

__all__ = [
    "ConvergenceError",
    "RegressionError",
    "ValidationError",
    "g_solution",
    "normalize_config",
    "oracle_linear_bsde",
    "oracle_no_claim",
    "oracle_put_price",
    "reference_config",
    "selftest",
    "singular_ode_state",
    "solve",
    "survival_probability",
    "sweep",
    "value_function",
]
