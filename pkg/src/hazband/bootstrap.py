"""Weird-bootstrap resampling of a counting process.

Conditional on the data, each jump of N is replaced by an independent
binomial draw with size Y(T_j) and success probability dN(T_j)/Y(T_j);
the resampled increments yield a bootstrap cumulative hazard with the
same jump times.  The studentised process

    T*(x) = (A*(x) - A(x)) / sigma(x)

uses the standard error of the original sample throughout.  Where sigma
is zero (before the first jump, or when every jump so far was certain)
the numerator vanishes too and T* is defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError
from .process import CountingPath, HazardEstimate, RiskPath
from .stepfun import StepFunction, TimeInterval, cumulative_steps


@dataclass(frozen=True)
class WeirdReplicate:
    """One bootstrap draw: resampled counts per original jump time."""

    jump_times: np.ndarray
    counts: np.ndarray  # 0 <= counts[j] <= Y(T_j)
    cum_hazard_star: StepFunction

    def counting_path(self) -> CountingPath:
        """The replicate as a counting process (zero increments dropped)."""
        keep = self.counts > 0
        return CountingPath(self.jump_times[keep], self.counts[keep])


@dataclass(frozen=True)
class SupStatistics:
    """Extrema of T* over an interval."""

    sup_abs: float
    min_t: float
    max_t: float

    def __post_init__(self):
        if self.min_t > self.max_t:
            raise InvalidInputError("min exceeds max")


def _jump_data(events: CountingPath, risk: RiskPath):
    d = events.increments.astype(np.float64)
    y = risk.at_risk_many(events.times).astype(np.float64)
    if np.any(y < events.increments) or np.any(y == 0):
        raise InvalidInputError("risk process inconsistent with events")
    return d, y


def weird_resample(
    events: CountingPath, risk: RiskPath, rng: np.random.Generator
) -> WeirdReplicate:
    """Draw one weird-bootstrap replicate of ``events`` given ``risk``."""
    times = events.times
    if times.size == 0:
        empty = np.empty(0)
        a_star = cumulative_steps(empty, empty, risk.domain)
        return WeirdReplicate(times, np.empty(0, dtype=np.int64), a_star)
    d, y = _jump_data(events, risk)
    counts = rng.binomial(y.astype(np.int64), d / y)
    a_star = cumulative_steps(times, counts / y, risk.domain)
    return WeirdReplicate(jump_times=times, counts=counts, cum_hazard_star=a_star)


def resample_increment_matrix(
    events: CountingPath, risk: RiskPath, b: int, rng: np.random.Generator
) -> np.ndarray:
    """(b, n_jumps) matrix of resampled increments; rows are replicates."""
    if events.times.size == 0:
        return np.zeros((b, 0), dtype=np.int64)
    d, y = _jump_data(events, risk)
    return rng.binomial(y.astype(np.int64), d / y, size=(b, d.size))


def _segment_index(jump_times: np.ndarray, s: TimeInterval) -> np.ndarray:
    """Jump indices of the constant segments of the estimates over S.

    Entry -1 stands for the stretch before the first jump; the first
    entry is the segment in force at S.start, the rest are jumps in
    (S.start, S.end].
    """
    lo = int(np.searchsorted(jump_times, s.start, side="right"))
    hi = int(np.searchsorted(jump_times, s.end, side="right"))
    return np.concatenate(([lo - 1], np.arange(lo, hi)))


def sup_statistics_batch(
    a_star_cum: np.ndarray, estimate: HazardEstimate, s: TimeInterval
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-replicate (sup_abs, min, max) of T* over S.

    ``a_star_cum`` holds the bootstrap cumulative hazards at the original
    jump times, one row per replicate; the denominator is the original
    sample's standard error.  T* is piecewise constant, so the extrema
    are exact: the segment in force at S.start and every jump in
    (S.start, S.end] are enumerated.
    """
    if not estimate.domain.covers(s):
        raise DomainError("interval outside the estimate's domain")
    idx = _segment_index(estimate.jump_times, s)
    b = a_star_cum.shape[0]

    a_vals = np.concatenate(([0.0], estimate.cum_hazard.values))[idx + 1]
    sig = np.sqrt(np.concatenate(([0.0], estimate.variance.values))[idx + 1])
    a_star = np.concatenate((np.zeros((b, 1)), a_star_cum), axis=1)[:, idx + 1]

    with np.errstate(divide="ignore", invalid="ignore"):
        t = (a_star - a_vals) / sig
    t[:, sig == 0.0] = 0.0
    min_t = t.min(axis=1)
    max_t = t.max(axis=1)
    return np.maximum(np.abs(min_t), np.abs(max_t)), min_t, max_t


def sup_statistics_batch_studentized(
    a_star_cum: np.ndarray,
    counts: np.ndarray,
    at_risk: np.ndarray,
    estimate: HazardEstimate,
    s: TimeInterval,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bootstrap-t variant: each replicate is scaled by its own standard
    error, recomputed from the resampled increments.

    Points where a replicate's own variance estimate is still zero carry
    no studentisable information and contribute T* = 0.
    """
    if not estimate.domain.covers(s):
        raise DomainError("interval outside the estimate's domain")
    idx = _segment_index(estimate.jump_times, s)
    b = a_star_cum.shape[0]

    a_vals = np.concatenate(([0.0], estimate.cum_hazard.values))[idx + 1]
    a_star = np.concatenate((np.zeros((b, 1)), a_star_cum), axis=1)[:, idx + 1]
    var_star = np.cumsum(counts * (at_risk - counts) / at_risk**3, axis=1)
    sig_star = np.sqrt(
        np.concatenate((np.zeros((b, 1)), var_star), axis=1)[:, idx + 1]
    )
    num = a_star - a_vals
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / sig_star
    t[sig_star == 0.0] = 0.0
    min_t = t.min(axis=1)
    max_t = t.max(axis=1)
    return np.maximum(np.abs(min_t), np.abs(max_t)), min_t, max_t


def t_star_extrema(
    replicate: WeirdReplicate, estimate: HazardEstimate, s: TimeInterval
) -> SupStatistics:
    """Extrema of the studentised bootstrap process over S."""
    if not np.array_equal(replicate.jump_times, estimate.jump_times):
        raise InvalidInputError("replicate does not match the estimate's jump times")
    a_star = replicate.cum_hazard_star.values[np.newaxis, :]
    sup, mn, mx = sup_statistics_batch(a_star, estimate, s)
    return SupStatistics(float(sup[0]), float(mn[0]), float(mx[0]))
