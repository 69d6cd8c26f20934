"""Dipolar cross-relaxation model for NV-center ensembles."""

from ._core import (
    Error,
    FitError,
    InvalidArgument,
    __version__,
    characteristic_time,
    decay_curve,
    default_misaligned_direction,
    degeneracy_lift,
    eta_table,
    fit_beta,
    fit_t1,
    fit_width,
    multipliers,
    overlap,
    polarization,
    rate_density,
    sensitivity,
    transitions,
    transverse_scan,
)

__all__ = [
    "Error",
    "FitError",
    "InvalidArgument",
    "__version__",
    "characteristic_time",
    "decay_curve",
    "default_misaligned_direction",
    "degeneracy_lift",
    "eta_table",
    "fit_beta",
    "fit_t1",
    "fit_width",
    "multipliers",
    "overlap",
    "polarization",
    "rate_density",
    "sensitivity",
    "transitions",
    "transverse_scan",
]
