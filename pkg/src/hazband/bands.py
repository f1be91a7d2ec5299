"""Simultaneous confidence bands for the cumulative hazard.

Eight constructions share one output shape (a pair of step functions on
the band interval S):

* ``B1``   bootstrap, symmetric: A +- t1*sigma, t1 the larger of the two
  one-sided theta/2 quantiles of the T* extrema.
* ``B2``   bootstrap, equal-tailed: [A - t3*sigma, A - t2*sigma] with
  (t2, t3) balancing the left/right escape fractions of T*.
* ``HW`` / ``EP``  asymptotic bands from weighted Brownian-bridge sup
  quantiles (constant and equal-precision weights).
* ``AHW`` / ``AEP`` / ``LHW`` / ``LEP``  arcsine- and log-transformed
  versions of the asymptotic bands (delta method on the band edges).

Lower edges are clipped at zero for every method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bridge
from .bootstrap import (
    _segment_index,
    resample_increment_matrix,
    sup_statistics_batch_studentized,
)
from .bridge import EP_WEIGHT, HW_WEIGHT, quantile_order_statistic
from .errors import DegenerateBandError, InvalidInputError
from .process import CountingPath, HazardEstimate, RiskPath
from .stepfun import StepFunction, TimeInterval

BOOTSTRAP_METHODS = ("B1", "B2")
ASYMPTOTIC_METHODS = ("HW", "EP")
TRANSFORMED_METHODS = ("AHW", "AEP", "LHW", "LEP")
METHODS = BOOTSTRAP_METHODS + ASYMPTOTIC_METHODS + TRANSFORMED_METHODS


@dataclass(frozen=True)
class BandSettings:
    """Method, level and interval for one band; 1 - theta is the coverage."""

    method: str
    theta: float
    s: TimeInterval
    b_resamples: int = 200
    bridge_paths: int = bridge.DEFAULT_PATHS
    bridge_grid: int = bridge.DEFAULT_GRID

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInputError(f"unknown band method {self.method!r}")
        if not 0.0 < self.theta < 1.0:
            raise InvalidInputError("theta must be in (0, 1)")
        if self.method in BOOTSTRAP_METHODS and self.b_resamples < 1:
            raise InvalidInputError("need at least one bootstrap resample")


@dataclass(frozen=True)
class ConfidenceBand:
    """Lower/upper step functions on S plus the critical values used."""

    lower: StepFunction
    upper: StepFunction
    method: str
    theta: float
    s: TimeInterval
    critical_values: tuple

    def __post_init__(self):
        lo = np.concatenate(([self.lower.initial_value], self.lower.values))
        hi = np.concatenate(([self.upper.initial_value], self.upper.values))
        if lo.shape != hi.shape or not np.array_equal(
            self.lower.breakpoints, self.upper.breakpoints
        ):
            raise InvalidInputError("band edges must share breakpoints")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise InvalidInputError("band edges contain NaN")
        if np.any(lo < 0):
            raise InvalidInputError("lower band edge must be nonnegative")
        if np.any(lo > hi):
            raise InvalidInputError("band edges cross")

    def edge_segments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(segment starts, lower values, upper values) over S."""
        starts = np.concatenate(([self.s.start], self.lower.breakpoints))
        lo = np.concatenate(([self.lower.initial_value], self.lower.values))
        hi = np.concatenate(([self.upper.initial_value], self.upper.values))
        return starts, lo, hi


def critical_value_symmetric(sup_abs_values, theta: float) -> float:
    """Order-statistic critical value: k-th smallest, k = ceil((B+1)(1-theta))."""
    values = np.asarray(sup_abs_values, dtype=float)
    if values.size == 0:
        raise InvalidInputError("no bootstrap statistics")
    return quantile_order_statistic(values, 1.0 - theta)


def critical_values_equal_tailed(min_ts, max_ts, theta: float) -> tuple[float, float]:
    """Equal-tailed pair (t2, t3) from per-replicate extrema of T*.

    t2 is the empirical lam-quantile of the minima and t3 the (1-lam)
    quantile of the maxima, evaluated per the shared order-statistic
    rule.  The tail level is the smallest one whose joint retention
    fraction is still >= 1 - theta and closest to it among feasible
    levels; by construction the two one-sided escape fractions then
    differ by at most one replicate.  The candidate levels are exactly
    the points where the quantile pair changes, so the search is an
    exhaustive scan.
    """
    mins = np.asarray(min_ts, dtype=float)
    maxs = np.asarray(max_ts, dtype=float)
    if mins.size == 0 or mins.size != maxs.size:
        raise InvalidInputError("need matching, nonempty extrema samples")
    if not 0.0 < theta < 1.0:
        raise InvalidInputError("theta must be in (0, 1)")
    b = mins.size
    mins_sorted = np.sort(mins)
    maxs_sorted = np.sort(maxs)

    def pair(lam: float) -> tuple[float, float]:
        return (
            quantile_order_statistic(mins_sorted, lam),
            quantile_order_statistic(maxs_sorted, 1.0 - lam),
        )

    def joint(t2: float, t3: float) -> float:
        # replicate-paired retention fraction
        return float(np.mean((mins >= t2) & (maxs <= t3)))

    # the quantile pair is constant between consecutive points of the
    # (b+1)-grid and takes a distinct value exactly at each grid point,
    # so midpoints plus grid points enumerate every reachable pair
    ks = np.arange(1, b + 2)
    grid = np.concatenate(((ks - 0.5) / (b + 1), ks / (b + 1)))
    candidates = sorted(lam for lam in grid if 0.0 < lam < theta) + [theta]
    target = 1.0 - theta
    best = None  # (joint, pair); ties keep the smallest level
    for lam in candidates:
        t2, t3 = pair(lam)
        cov = joint(t2, t3)
        if cov >= target and (best is None or cov < best[0] - 1e-12):
            best = (cov, (t2, t3))
    if best is None:
        # even the widest quantile pair misses the target; return it
        return pair(candidates[0])
    return best[1]


def _segments_over(estimate: HazardEstimate, s: TimeInterval):
    """Per-segment (start, cum hazard, variance) of the estimate over S."""
    idx = _segment_index(estimate.jump_times, s)
    starts = np.concatenate(([s.start], estimate.jump_times[idx[1:]]))
    a = np.concatenate(([0.0], estimate.cum_hazard.values))[idx + 1]
    v = np.concatenate(([0.0], estimate.variance.values))[idx + 1]
    return starts, a, v


def _assemble(starts, lo_vals, hi_vals, settings, critical_values) -> ConfidenceBand:
    lo_vals = np.maximum(lo_vals, 0.0)
    s = settings.s
    return ConfidenceBand(
        lower=StepFunction(lo_vals[0], starts[1:], lo_vals[1:], s),
        upper=StepFunction(hi_vals[0], starts[1:], hi_vals[1:], s),
        method=settings.method,
        theta=settings.theta,
        s=s,
        critical_values=tuple(float(c) for c in critical_values),
    )


def bootstrap_band(
    estimate: HazardEstimate,
    events: CountingPath,
    risk: RiskPath,
    settings: BandSettings,
    rng: np.random.Generator,
) -> ConfidenceBand:
    """Weird-bootstrap band (method B1 or B2).

    Critical values come from the bootstrap-t statistics: each replicate
    of the centred cumulative hazard is studentised by its own recomputed
    standard error, and the band is the original estimate plus/minus the
    resulting quantiles times the original standard error.
    """
    if settings.method not in BOOTSTRAP_METHODS:
        raise InvalidInputError(f"{settings.method} is not a bootstrap method")
    s = settings.s
    if not estimate.domain.covers(s):
        raise InvalidInputError("band interval outside the data range")
    times = events.times
    if times.size == 0 or times[0] > s.end:
        raise DegenerateBandError("no events at or before the end of the band interval")

    counts = resample_increment_matrix(events, risk, settings.b_resamples, rng)
    y = risk.at_risk_many(times).astype(np.float64)
    a_star_cum = np.cumsum(counts / y, axis=1)
    sup_abs, min_t, max_t = sup_statistics_batch_studentized(
        a_star_cum, counts, y, estimate, s
    )

    starts, a, v = _segments_over(estimate, s)
    sig = np.sqrt(v)
    if settings.method == "B1":
        # symmetric width from two one-sided theta/2 quantiles; this is
        # what reproduces the published coverage of the symmetric band
        # (deliberately conservative, each side calibrated on its own)
        half = settings.theta / 2.0
        t1 = max(
            quantile_order_statistic(max_t, 1.0 - half),
            -quantile_order_statistic(min_t, half),
            0.0,
        )
        lo, hi = a - t1 * sig, a + t1 * sig
        crit = (t1,)
    else:
        t2, t3 = critical_values_equal_tailed(min_t, max_t, settings.theta)
        lo, hi = a - t3 * sig, a - t2 * sig
        crit = (t2, t3)
    return _assemble(starts, lo, hi, settings, crit)


def _base_weight(method: str) -> str:
    return HW_WEIGHT if method.endswith("HW") or method == "HW" else EP_WEIGHT


def _half_width(
    estimate: HazardEstimate,
    settings: BandSettings,
    weight: str,
    rng,
    k_lookup,
):
    """Half-width w(s) of the untransformed asymptotic band, per segment."""
    n = estimate.n_initial
    if n < 1:
        raise InvalidInputError("need a positive initial sample size")
    s = settings.s
    if not estimate.domain.covers(s):
        raise InvalidInputError("band interval outside the data range")
    starts, a, v = _segments_over(estimate, s)
    v1 = float(estimate.variance(s.start))
    v2 = float(estimate.variance(s.end))
    if weight == EP_WEIGHT and v1 == 0.0:
        raise DegenerateBandError(
            "no events before the band start: equal-precision weight undefined"
        )
    c1 = n * v1 / (1.0 + n * v1)
    c2 = n * v2 / (1.0 + n * v2)
    if k_lookup is not None:
        k = float(k_lookup(weight, c1, c2))
    else:
        k = bridge.brownian_bridge_sup_quantile(
            weight, c1, c2, settings.theta, settings.bridge_paths,
            settings.bridge_grid, rng,
        )
    nv = n * v
    c = nv / (1.0 + nv)
    with np.errstate(divide="ignore"):
        w = k * (1.0 + nv) / (np.sqrt(n) * bridge.weight_values(weight, c))
    return starts, a, w, k


def asymptotic_band(
    estimate: HazardEstimate,
    settings: BandSettings,
    rng: np.random.Generator | None = None,
    k_lookup=None,
) -> ConfidenceBand:
    """Hall-Wellner or equal-precision band from bridge sup quantiles.

    ``k_lookup(weight, c1, c2)`` may replace the direct Monte Carlo
    quantile (used by the simulation harness with a precomputed table).
    """
    if settings.method not in ASYMPTOTIC_METHODS:
        raise InvalidInputError(f"{settings.method} is not an asymptotic method")
    weight = _base_weight(settings.method)
    starts, a, w, k = _half_width(estimate, settings, weight, rng, k_lookup)
    return _assemble(starts, a - w, a + w, settings, (k,))


def transformed_band(
    estimate: HazardEstimate,
    settings: BandSettings,
    rng: np.random.Generator | None = None,
    k_lookup=None,
) -> ConfidenceBand:
    """Arcsine- or log-transformed asymptotic band (delta method edges)."""
    if settings.method not in TRANSFORMED_METHODS:
        raise InvalidInputError(f"{settings.method} is not a transformed method")
    weight = _base_weight(settings.method)
    starts, a, w, k = _half_width(estimate, settings, weight, rng, k_lookup)
    if settings.method.startswith("L"):
        if np.any(a <= 0.0):
            raise DegenerateBandError(
                "log-transformed band needs a positive estimate on all of S"
            )
        lo = a * np.exp(-w / a)
        hi = a * np.exp(w / a)
    else:
        lo, hi = _arcsine_edges(a, w)
    return _assemble(starts, lo, hi, settings, (k,))


def _arcsine_edges(a: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    root = np.exp(-a / 2.0)
    angle = np.arcsin(root)
    with np.errstate(divide="ignore", invalid="ignore"):
        spread = 0.5 * w * root / np.sqrt(1.0 - root**2)
    # a == 0 with positive width gives an infinite spread: the transform
    # pins the lower edge to 0 and sends the upper edge to infinity there.
    spread = np.where(w == 0.0, 0.0, np.where(np.isnan(spread), np.inf, spread))
    half_pi = 0.5 * np.pi
    with np.errstate(divide="ignore"):
        lo = -2.0 * np.log(np.sin(np.clip(angle + spread, 0.0, half_pi)))
        hi = -2.0 * np.log(np.sin(np.clip(angle - spread, 0.0, half_pi)))
    return lo, hi
