"""Python interface to the weighted boundary-integral identity harness."""

from holoweight._core import (
    bergman_coefficients,
    catalog_ids,
    delta,
    domain_ids,
    multiplier_ids,
    self_test,
    smoothing_ratios,
    verify,
    weight_value,
)

__all__ = [
    "bergman_coefficients",
    "catalog_ids",
    "delta",
    "domain_ids",
    "multiplier_ids",
    "self_test",
    "smoothing_ratios",
    "verify",
    "weight_value",
]

__version__ = "0.1.0"
