"""Wavelet norms, ARB(1) simulation and componentwise estimation."""

from ._core import (
    ConfigError,
    Error,
    IoError,
    ModelGateError,
    NumericError,
    besov_norms,
    build_operators,
    daubechies_filter,
    dwt_forward,
    dwt_inverse,
    error_bound_xi,
    fit_estimator,
    run_experiment,
    simulate,
    stationary_covariance,
    truncation_order,
    weighted_norms,
)

__all__ = [
    "ConfigError",
    "Error",
    "IoError",
    "ModelGateError",
    "NumericError",
    "besov_norms",
    "build_operators",
    "daubechies_filter",
    "dwt_forward",
    "dwt_inverse",
    "error_bound_xi",
    "fit_estimator",
    "run_experiment",
    "simulate",
    "stationary_covariance",
    "truncation_order",
    "weighted_norms",
]
