"""Python access to the microlimit library."""

from ._core import (
    DegenerateSample,
    InputError,
    audit,
    count_variance,
    expected_count,
    kernel_eval,
    ks_two_sample,
    sample_spectrum,
    semicircle_density,
    stieltjes_pv,
    xi,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateSample",
    "InputError",
    "audit",
    "count_variance",
    "expected_count",
    "kernel_eval",
    "ks_two_sample",
    "sample_spectrum",
    "semicircle_density",
    "stieltjes_pv",
    "xi",
]
