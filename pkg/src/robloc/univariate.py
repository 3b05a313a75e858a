"""Univariate medians and order-statistic MAD variants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = ["MedianInterval", "univariate_median", "mad"]


@dataclass(frozen=True)
class MedianInterval:
    """Set-valued sample median: the full interval of minimizers.

    For odd n both endpoints equal the middle order statistic; for even n
    the interval spans the two central order statistics. ``midpoint`` is the
    conventional point representative.
    """

    low: float
    high: float

    def __post_init__(self):
        if self.low > self.high:
            raise ParameterError(f"median interval endpoints out of order: {self.low} > {self.high}")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def is_point(self) -> bool:
        return self.low == self.high


def univariate_median(values) -> MedianInterval:
    """Sample median as an order-statistic interval.

    Odd n: both endpoints are the middle order statistic. Even n: the
    interval [x_(n/2), x_(n/2+1)].
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    n = v.size
    if n == 0:
        raise ParameterError("median of an empty sample")
    if not np.all(np.isfinite(v)):
        raise ParameterError("median requires finite values")
    s = np.sort(v)
    if n % 2 == 1:
        mid = s[n // 2]
        return MedianInterval(float(mid), float(mid))
    return MedianInterval(float(s[n // 2 - 1]), float(s[n // 2]))


def mad(values, order_shift: int = 0) -> float:
    """Median absolute deviation with an order-statistic shift.

    Deviations are taken about the median midpoint, and the scale is the
    ceil((n + j + 1) / 2)-th smallest deviation for shift j (clamped to the
    n-th). ``order_shift=0`` is the ordinary high-median MAD for odd n;
    positive shifts move the scale up the order statistics, which is what
    projection-type estimators use to trade bias for breakdown.
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    n = v.size
    if n == 0:
        raise ParameterError("MAD of an empty sample")
    j = int(order_shift)
    if j < 0 or j > n - 1:
        raise ParameterError(f"order_shift must be in [0, n-1], got {j} with n={n}")
    center = univariate_median(v).midpoint
    devs = np.sort(np.abs(v - center))
    rank = min(-(-(n + j + 1) // 2), n)  # ceil((n+j+1)/2), clamped
    return float(devs[rank - 1])
