"""Certified enclosures for the monotone power sums the certificates rest on.

Every enclosure here follows one recipe: a float64 partial sum over the head
of the series, an integral bracket for the monotone tail, and an explicit
allowance for accumulated rounding.  The summands are positive and strictly
decreasing, so the brackets are elementary:

    integral_{J+1}^{inf} f(t) dt  <=  sum_{k>J} f(k)  <=  integral_{J}^{inf} f(t) dt

for any decreasing f.  No general interval arithmetic is needed.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .errors import InvalidExponent

_EPS = float(np.finfo(np.float64).eps)

# Chunk length for partial sums; keeps peak memory under ~100 MB.
_CHUNK = 10_000_000

# Covers numpy pairwise-summation error (<= ceil(log2 n) ulps relative for
# n <= 2^40), <= 2 ulp per-term power error, and the handful of roundings
# when endpoints are assembled, with several-fold headroom.
_ROUNDING_FACTOR = 64.0 * _EPS


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; the certified enclosure currency."""

    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise ValueError(f"not an interval: [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def as_pair(self) -> list[float]:
        return [self.lo, self.hi]


def rounding_allowance(partial: float) -> float:
    """Upper bound on float64 error of a chunked nonnegative partial sum."""
    return _ROUNDING_FACTOR * (1.0 + partial)


def require_exponent(s: float) -> float:
    s = float(s)
    if not math.isfinite(s) or s <= 1.0:
        raise InvalidExponent(f"decay exponent must satisfy s > 1, got {s}")
    return s


def partial_power_sum(s: float, terms: int) -> float:
    """sum_{k=1}^{terms} k^(-s), chunked to bound memory."""
    total = []
    start = 1
    while start <= terms:
        stop = min(start + _CHUNK, terms + 1)
        k = np.arange(start, stop, dtype=np.float64)
        total.append(float(np.power(k, -s).sum()))
        start = stop
    return math.fsum(total)


def power_tail_bracket(s: float, terms: int) -> Interval:
    """Integral bracket of sum_{k>terms} k^(-s)."""
    lo = (terms + 1.0) ** (1.0 - s) / (s - 1.0)
    hi = float(terms) ** (1.0 - s) / (s - 1.0)
    return Interval(lo, hi)


def power_sum_terms_for(s: float, tol: float) -> int:
    """Terms needed so the integral bracket of the zeta tail is <= tol."""
    # Bracket width is ~K^(-s); solve then verify, stepping up if short.
    k = max(10, math.ceil(tol ** (-1.0 / s)))
    while power_tail_bracket(s, k).width > tol and k < 2**62:
        k *= 2
    return k


def shifted_power_sum(step: float, s: float, tol: float = 1e-10,
                      max_terms: int = 50_000_000) -> Interval:
    """Certified enclosure of sum_{k>=1} (1 + k*step)^(-s).

    This is the per-class tail mass of an index set with consecutive gaps
    >= step under a power-law envelope.  The requested bracket width `tol`
    is met whenever it is reachable within `max_terms` summands; otherwise
    the tightest reachable (still valid) enclosure is returned.
    """
    s = require_exponent(s)
    step = float(step)
    if step <= 0.0:
        raise ValueError(f"separation step must be positive, got {step}")
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")

    # Width of the integral bracket is ~f(J) = (1+J*step)^(-s).
    j = math.ceil(((1.0 / tol) ** (1.0 / s) - 1.0) / step)
    j = max(8, min(j, max_terms))

    k = np.arange(1, j + 1, dtype=np.float64)
    partial = float(np.power(1.0 + k * step, -s).sum())
    allowance = rounding_allowance(partial)

    def integral_from(a: float) -> float:
        return (1.0 + a * step) ** (1.0 - s) / (step * (s - 1.0))

    return Interval(partial + integral_from(j + 1.0) - allowance,
                    partial + integral_from(float(j)) + allowance)
