"""Certified constants for power-law localization bounds.

Three quantities drive every certificate:

* ``zeta(s)``: the Riemann zeta value, enclosed by a partial sum bracketed
  with integral tails.
* ``sup_decay_sum(s)``: the supremum over real x of
  ``sum_{n>=1} (1 + |n - x|)**(-s)``, the uniform one-row mass of a
  unit-spaced index set.  Numerically the supremum is approached at integers
  deep in the interior, where the sum tends to ``1 + 2*(zeta(s) - 1)``; the
  returned enclosure uses certified grid evaluations as the lower endpoint
  and the analytic value as the upper endpoint, so it stays valid even
  without the attainment argument.
* ``separation_constant(s)``: an admissible constant kappa such that every
  index set with pairwise gaps >= delta has one-row mass at most
  ``kappa / delta**s``.  A delta-separated set has k-th neighbor at distance
  >= k*delta on each side, so ``2*zeta(s)`` is admissible; minimality is not
  claimed.  :func:`verify_separation_bound` stress-tests the claim against
  worst-case arithmetic progressions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .bounds import (
    Interval,
    partial_power_sum,
    power_sum_terms_for,
    power_tail_bracket,
    require_exponent,
    rounding_allowance,
)
from .parallel import thread_cap

# Hard cap on summation length; ~2 GB of chunked traffic, a few seconds.
_MAX_TERMS = 200_000_000

_SEPARATION_ZETA_TOL = 1e-12


def _plan_terms(s: float, tol: float) -> int:
    """Summands needed for a width-tol enclosure, allowance room included."""
    est_allowance = rounding_allowance(1.0 + 1.0 / (s - 1.0))
    budget = tol - 4.0 * est_allowance
    if budget <= 0.0:
        raise ValueError(f"zeta tolerance {tol} is below float64 resolution")
    return power_sum_terms_for(s, budget)


@lru_cache(maxsize=256)
def _zeta_impl(s: float, tol: float) -> Interval:
    terms = min(_plan_terms(s, tol), _MAX_TERMS)
    partial = partial_power_sum(s, terms)
    allowance = rounding_allowance(partial)
    tail = power_tail_bracket(s, terms)
    return Interval(partial + tail.lo - allowance, partial + tail.hi + allowance)


def zeta(s: float, tol: float = 1e-9) -> Interval:
    """Enclosure of the Riemann zeta function with width <= tol.

    The partial sum over k <= K is bracketed by the integral tails
    ``int_{K+1}^inf x**-s dx <= tail <= int_K^inf x**-s dx``; K is chosen
    from the tolerance.  Raises when the tolerance would need more than the
    summation cap (only reachable for s close to 1 with tight tolerances).
    """
    s = require_exponent(s)
    if not (tol > 0.0):
        raise ValueError(f"tolerance must be positive, got {tol}")
    if _plan_terms(s, float(tol)) > _MAX_TERMS:
        raise ValueError(
            f"zeta enclosure at tol={tol} for s={s} would need more than the "
            f"summation cap of {_MAX_TERMS} terms (relax the tolerance)")
    return _zeta_impl(s, float(tol))


def _zeta_relaxed(s: float, tol: float) -> Interval:
    """zeta enclosure at the requested width when reachable, else the
    tightest one the summation cap affords (still a valid enclosure)."""
    return _zeta_impl(require_exponent(s), float(tol))


def separation_constant(s: float) -> float:
    """Admissible constant in the separated-row-mass bound, here 2*zeta(s).

    Uses the upper end of the zeta enclosure so the result errs upward;
    anything >= 2*zeta(s) keeps every downstream certificate valid.
    """
    s = require_exponent(s)
    return 2.0 * _zeta_relaxed(s, _SEPARATION_ZETA_TOL).hi


# Depth of the interior grid pass; matches the one-period scan oracle.
_GRID_BASE = 50
_GRID_STEP = 1e-3
_GRID_HEAD_TERMS = 400
_SUP_MAX_TERMS = 20_000_000


def sup_decay_sum(s: float, tol: float = 1e-6) -> Interval:
    """Enclosure of sup over real x of sum_{n>=1} (1 + |n - x|)**(-s).

    Lower endpoint: certified evaluations of the sum at an integer deep in
    the interior (where the left part is a plain partial sum) and on a
    step-1e-3 grid across one period, each with integral tail brackets; any
    evaluation is a valid lower bound for the supremum.  Upper endpoint:
    ``2*zeta(s) - 1``, the limit value along integers, which dominates the
    whole line for s > 1.  The width meets ``tol`` whenever the required
    interior depth fits the summation cap.
    """
    s = require_exponent(s)
    if not (tol > 0.0):
        raise ValueError(f"tolerance must be positive, got {tol}")
    z = _zeta_relaxed(s, min(tol / 4.0, 1e-9))
    upper = math.nextafter(2.0 * z.hi - 1.0, math.inf)

    # Interior depth so that the missing left tail <= tol/2.
    depth = math.ceil((2.0 / ((s - 1.0) * tol)) ** (1.0 / (s - 1.0)))
    depth = max(_GRID_BASE, min(depth, _SUP_MAX_TERMS))
    head = partial_power_sum(s, depth) - 1.0  # sum over j = 2..depth
    lower = z.lo + head - rounding_allowance(head + 1.0)

    # One-period scan: numerical support that integers carry the supremum,
    # and an independent family of lower bounds.
    xs = _GRID_BASE + np.arange(0.0, 1.0 + _GRID_STEP / 2.0, _GRID_STEP)
    n = np.arange(1.0, _GRID_BASE + _GRID_HEAD_TERMS + 1.0)
    sums = np.power(1.0 + np.abs(n[None, :] - xs[:, None]), -s).sum(axis=1)
    a = n[-1] - xs  # distance from each x to the first omitted index, minus 1
    tail_lo = (2.0 + a) ** (1.0 - s) / (s - 1.0)
    grid_allowance = rounding_allowance(float(sums.max()))
    grid_lower = float((sums + tail_lo).max()) - grid_allowance
    lower = max(lower, grid_lower, 1.0)  # the term at n = x alone gives 1

    if lower > upper:
        raise RuntimeError(
            f"sup_decay_sum enclosure collapsed for s={s}: [{lower}, {upper}]")
    return Interval(lower, upper)


class SeparationCheck(NamedTuple):
    delta: int
    measured: float
    bound: float
    ratio: float


@dataclass(frozen=True)
class SeparationVerdict:
    passed: bool
    worst_ratio: float
    checks: tuple[SeparationCheck, ...]


def verify_separation_bound(s: float, delta_max: int, trunc: int) -> SeparationVerdict:
    """Stress-test the separated-row-mass bound on worst-case progressions.

    For each gap delta, the extremal delta-separated set is an arithmetic
    progression of step delta; the supremal one-row off-diagonal mass over
    its bi-infinite extension is ``2 * sum_{k>=1} (1 + k*delta)**(-s)``,
    measured here by a partial sum of ``trunc // delta`` terms per side plus
    an integral tail, then compared against
    ``separation_constant(s) / delta**s``.
    """
    s = require_exponent(s)
    delta_max = int(delta_max)
    trunc = int(trunc)
    if delta_max < 1:
        raise ValueError(f"delta_max must be >= 1, got {delta_max}")
    if trunc < 10 * delta_max:
        raise ValueError(f"truncation {trunc} is too short for delta_max {delta_max}; "
                         f"need at least {10 * delta_max}")
    kappa = separation_constant(s)

    def check(delta: int) -> SeparationCheck:
        j = max(8, trunc // delta)
        k = np.arange(1, j + 1, dtype=np.float64)
        partial = float(np.power(1.0 + k * delta, -s).sum())
        tail_hi = (1.0 + j * float(delta)) ** (1.0 - s) / (delta * (s - 1.0))
        measured = 2.0 * (partial + tail_hi + rounding_allowance(partial))
        bound = kappa / float(delta) ** s
        return SeparationCheck(delta, measured, bound, measured * float(delta) ** s / kappa)

    deltas = range(1, delta_max + 1)
    workers = min(thread_cap(), delta_max)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            checks = tuple(pool.map(check, deltas))
    else:
        checks = tuple(check(d) for d in deltas)
    worst = max(c.ratio for c in checks)
    return SeparationVerdict(passed=all(c.measured <= c.bound for c in checks),
                             worst_ratio=worst, checks=checks)


@dataclass(frozen=True)
class LocalizationConstants:
    """Bundle of the certified constants at one exponent."""

    s: float
    zeta: Interval
    sup_sum: Interval
    separation: float

    def __post_init__(self):
        if self.sup_sum.lo < 1.0:
            raise ValueError("sup of the decay sum is at least 1 (take x at an index)")
        if self.separation < 2.0:
            raise ValueError("separation constant is at least 2 (zeta exceeds 1)")

    @classmethod
    def compute(cls, s: float, zeta_tol: float = 1e-9,
                sup_tol: float = 1e-6) -> "LocalizationConstants":
        s = require_exponent(s)
        return cls(s=s, zeta=zeta(s, zeta_tol), sup_sum=sup_decay_sum(s, sup_tol),
                   separation=separation_constant(s))
