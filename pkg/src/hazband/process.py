"""Counting and at-risk processes plus the Nelson-Aalen estimators.

The observed data are a counting process N (event times with integer
multiplicities) and a nonincreasing at-risk process Y.  ``nelson_aalen``
turns the pair into the cumulative-hazard estimate and its variance
estimate; ``from_censored_sample`` builds the pair from right-censored
survival records.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .stepfun import StepFunction, TimeInterval, cumulative_steps


@dataclass(frozen=True)
class CountingPath:
    """Event process: strictly increasing jump times with increments >= 1."""

    times: np.ndarray
    increments: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        incs = np.asarray(self.increments, dtype=np.int64)
        if times.ndim != 1 or incs.ndim != 1 or times.size != incs.size:
            raise InvalidInputError("times and increments must be 1-d and equal length")
        if times.size and not np.all(np.diff(times) > 0):
            raise InvalidInputError("jump times must be strictly increasing")
        if np.any(incs < 1):
            raise InvalidInputError("jump increments must be >= 1")
        times.flags.writeable = False
        incs.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "increments", incs)

    @property
    def n_jumps(self) -> int:
        return int(self.times.size)

    def count_at(self, t: float) -> int:
        """N(t), the number of events up to and including time t."""
        idx = np.searchsorted(self.times, t, side="right")
        return int(self.increments[:idx].sum())


@dataclass(frozen=True)
class RiskPath:
    """At-risk process Y.

    Internally a right-continuous nonincreasing integer step function;
    ``at_risk(t)`` returns its left limit, the number at risk just before
    time t, which is the quantity entering the estimators.
    """

    steps: StepFunction

    def __post_init__(self):
        vals = np.concatenate(([self.steps.initial_value], self.steps.values))
        if np.any(vals < 0):
            raise InvalidInputError("at-risk values must be nonnegative")
        if np.any(np.diff(vals) > 0):
            raise InvalidInputError("at-risk process must be nonincreasing")
        if np.any(vals != np.round(vals)):
            raise InvalidInputError("at-risk values must be integers")

    @property
    def domain(self) -> TimeInterval:
        return self.steps.domain

    @property
    def initial(self) -> int:
        return int(self.steps.initial_value)

    def at_risk(self, t) -> int:
        if np.isscalar(t):
            return int(self.steps.left_limit(t))
        return self.at_risk_many(np.asarray(t, dtype=float))

    def at_risk_many(self, t: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.steps.breakpoints, t, side="left")
        levels = np.concatenate(([self.steps.initial_value], self.steps.values))
        return levels[idx].astype(np.int64)

    def segments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(start, end, value) triples of the maximal constancy intervals."""
        bp = self.steps.breakpoints
        starts = np.concatenate(([self.domain.start], bp))
        ends = np.concatenate((bp, [self.domain.end]))
        vals = np.concatenate(([self.steps.initial_value], self.steps.values))
        return starts, ends, vals


@dataclass(frozen=True)
class HazardEstimate:
    """Nelson-Aalen output: cumulative hazard, variance estimate, and the
    initial sample size used for sqrt(n) normalisation."""

    cum_hazard: StepFunction
    variance: StepFunction
    n_initial: int

    @property
    def jump_times(self) -> np.ndarray:
        return self.cum_hazard.breakpoints

    @property
    def domain(self) -> TimeInterval:
        return self.cum_hazard.domain


def nelson_aalen(events: CountingPath, risk: RiskPath) -> HazardEstimate:
    """Cumulative-hazard and variance estimates from (N, Y).

    At a jump time with multiplicity d and y at risk the hazard increment
    is d/y and the variance increment d*(y-d)/y^3 (the tie-generalised
    form; for d == 1 these are 1/y and (y-1)/y^3).
    """
    times = events.times
    d = events.increments.astype(np.float64)
    y = risk.at_risk_many(times).astype(np.float64)
    if np.any(y < events.increments):
        bad = times[y < events.increments]
        raise InvalidInputError(
            f"more events than subjects at risk at t={bad[0]:g}"
        )
    if np.any(y == 0):
        bad = times[y == 0]
        raise InvalidInputError(f"no subjects at risk at jump time t={bad[0]:g}")
    hazard_inc = d / y
    var_inc = d * (y - d) / y**3
    domain = risk.domain
    return HazardEstimate(
        cum_hazard=cumulative_steps(times, hazard_inc, domain),
        variance=cumulative_steps(times, var_inc, domain),
        n_initial=risk.initial,
    )


def from_censored_sample(
    times, observed
) -> tuple[CountingPath, RiskPath]:
    """Build (N, Y) from right-censored records.

    ``times`` are positive observation times, ``observed`` is truthy for an
    event and falsy for a censoring.  Y(t) counts subjects with time >= t,
    so at tied event/censoring times the censored subjects still count as
    at risk (events are processed first).
    """
    times = np.asarray(times, dtype=float)
    observed = np.asarray(observed, dtype=bool)
    if times.ndim != 1 or times.size == 0:
        raise InvalidInputError("need at least one record")
    if observed.shape != times.shape:
        raise InvalidInputError("times and statuses must have equal length")
    if np.any(times <= 0) or not np.all(np.isfinite(times)):
        raise InvalidInputError("record times must be positive and finite")

    n = times.size
    distinct = np.unique(times)
    # Y just after u is the count of records strictly beyond u.
    remaining = n - np.searchsorted(np.sort(times), distinct, side="right")
    domain = TimeInterval(0.0, float(distinct[-1]))
    risk = RiskPath(StepFunction(float(n), distinct, remaining.astype(float), domain))

    event_times = times[observed]
    if event_times.size:
        jump_times, counts = np.unique(event_times, return_counts=True)
        events = CountingPath(jump_times, counts)
    else:
        events = CountingPath(np.empty(0), np.empty(0, dtype=np.int64))
    return events, risk
