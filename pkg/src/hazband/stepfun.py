"""Right-continuous step functions on a bounded time interval.

These are the carriers for every curve in the package: the cumulative
hazard estimate, its variance estimate, the at-risk process and band
edges are all piecewise constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError


@dataclass(frozen=True)
class TimeInterval:
    """Closed interval [start, end] with 0 <= start < end < inf."""

    start: float
    end: float

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise InvalidInputError("interval endpoints must be finite")
        if self.start < 0:
            raise InvalidInputError("interval start must be >= 0")
        if not self.start < self.end:
            raise InvalidInputError(
                f"interval start must precede end, got [{self.start}, {self.end}]"
            )

    def contains(self, t: float) -> bool:
        return self.start <= t <= self.end

    def covers(self, other: "TimeInterval") -> bool:
        return self.start <= other.start and other.end <= self.end

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant, right-continuous function.

    The value is ``initial_value`` on [domain.start, breakpoints[0]) and
    ``values[i]`` on [breakpoints[i], breakpoints[i+1]).  Breakpoints are
    strictly increasing and lie inside the domain.
    """

    initial_value: float
    breakpoints: np.ndarray
    values: np.ndarray
    domain: TimeInterval

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if bp.ndim != 1 or vals.ndim != 1 or bp.size != vals.size:
            raise InvalidInputError("breakpoints and values must be 1-d and equal length")
        if bp.size and not np.all(np.diff(bp) > 0):
            raise InvalidInputError("breakpoints must be strictly increasing")
        if bp.size and (bp[0] < self.domain.start or bp[-1] > self.domain.end):
            raise InvalidInputError("breakpoints must lie inside the domain")
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float, domain: TimeInterval) -> "StepFunction":
        return cls(value, np.empty(0), np.empty(0), domain)

    def __call__(self, t):
        """Right-continuous evaluation; ``t`` may be a scalar or array."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < self.domain.start) or np.any(t_arr > self.domain.end):
            raise DomainError(
                f"evaluation outside domain [{self.domain.start}, {self.domain.end}]"
            )
        idx = np.searchsorted(self.breakpoints, t_arr, side="right")
        levels = np.concatenate(([self.initial_value], self.values))
        out = levels[idx]
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def left_limit(self, t: float) -> float:
        """Value in force just before time ``t`` (equals f(t) off breakpoints)."""
        if not self.domain.contains(t):
            raise DomainError(
                f"evaluation outside domain [{self.domain.start}, {self.domain.end}]"
            )
        idx = int(np.searchsorted(self.breakpoints, t, side="left"))
        return self.initial_value if idx == 0 else float(self.values[idx - 1])

    def segment_values(self, interval: TimeInterval) -> tuple[np.ndarray, np.ndarray]:
        """Segment start times and values of f restricted to ``interval``.

        Returns (starts, values) where starts[0] == interval.start and the
        remaining starts are the breakpoints falling in (start, end].  The
        function equals values[i] on [starts[i], starts[i+1]) and on the
        final segment through interval.end.
        """
        if not self.domain.covers(interval):
            raise DomainError("interval outside the function's domain")
        lo = int(np.searchsorted(self.breakpoints, interval.start, side="right"))
        hi = int(np.searchsorted(self.breakpoints, interval.end, side="right"))
        starts = np.concatenate(([interval.start], self.breakpoints[lo:hi]))
        first = self.initial_value if lo == 0 else float(self.values[lo - 1])
        vals = np.concatenate(([first], self.values[lo:hi]))
        return starts, vals


def evaluate(f: StepFunction, t: float) -> float:
    """Right-continuous evaluation of ``f`` at ``t``."""
    return f(t)


def cumulative_steps(
    jump_times: np.ndarray, increments: np.ndarray, domain: TimeInterval
) -> StepFunction:
    """Step function starting at 0 that jumps by ``increments`` at ``jump_times``."""
    return StepFunction(0.0, jump_times, np.cumsum(increments), domain)
