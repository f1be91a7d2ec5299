"""Coverage experiments under the multiplicative intensity model.

Each trial draws an at-risk process from independent exponential
termination times, simulates the event process with intensity
alpha(t) * Y(t) by thinning, estimates the cumulative hazard, builds the
requested band and records whether the true integrated hazard stays
inside it.  Seeds derive from (master seed, cell identity, iteration),
so tables are reproducible and independent of worker scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bands as bands_mod
from .bands import BandSettings, ConfidenceBand
from .bridge import EP_WEIGHT, HW_WEIGHT, build_sup_quantile_table
from .errors import DegenerateBandError, DomainError, InvalidInputError
from .process import CountingPath, RiskPath, nelson_aalen
from .stepfun import StepFunction, TimeInterval

COVERED = "covered"
LEFT_MISS = "left_miss"
RIGHT_MISS = "right_miss"

ALPHA_ORDER = ("alpha1", "alpha2", "alpha3", "alpha4")
METHOD_ORDER = ("B1", "B2", "HW", "EP", "AHW", "AEP", "LHW", "LEP")

_TABLE_SEED_TAG = 0x7AB1E


def _rate1(t):
    return np.full_like(t, 5.0 / 3.0)


def _rate2(t):
    return 5.0 / 6.0 + 10.0 * (t - 0.5) ** 2


def _rate3(t):
    return 5.0 / 3.0 + 10.0 * (t - 0.5) ** 3


def _rate4(t):
    return 2.5 - 10.0 * (t - 0.5) ** 2


def _int1(t):
    return 5.0 * t / 3.0


def _int2(t):
    return 5.0 * t / 6.0 + (10.0 / 3.0) * ((t - 0.5) ** 3 + 0.125)


def _int3(t):
    return 5.0 * t / 3.0 + 2.5 * ((t - 0.5) ** 4 - 0.0625)


def _int4(t):
    return 2.5 * t - (10.0 / 3.0) * ((t - 0.5) ** 3 + 0.125)


_RATES = {"alpha1": _rate1, "alpha2": _rate2, "alpha3": _rate3, "alpha4": _rate4}
_INTEGRALS = {"alpha1": _int1, "alpha2": _int2, "alpha3": _int3, "alpha4": _int4}


@dataclass(frozen=True)
class IntensityModel:
    """One of the four benchmark hazards on [0, 1]."""

    name: str

    def __post_init__(self):
        if self.name not in _RATES:
            raise InvalidInputError(f"unknown intensity {self.name!r}")

    def rate(self, t):
        return _RATES[self.name](np.asarray(t, dtype=float))

    def integral(self, t):
        """Closed-form integrated hazard at t in [0, 1]."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
            raise DomainError("intensity models are defined on [0, 1]")
        out = _INTEGRALS[self.name](t_arr)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def max_rate_on(self, start: float, end: float) -> float:
        """Exact maximum of the rate over [start, end]."""
        if self.name == "alpha1":
            return 5.0 / 3.0
        if self.name == "alpha3":  # nondecreasing
            return float(self.rate(end))
        ends = max(float(self.rate(start)), float(self.rate(end)))
        if self.name == "alpha4" and start <= 0.5 <= end:  # interior peak
            return 2.5
        return ends


INTENSITIES = {name: IntensityModel(name) for name in ALPHA_ORDER}


def true_integrated_hazard(model: IntensityModel, t) -> float:
    return model.integral(t)


def generate_risk_path(
    y0: int, termination_mean: float, horizon: float, rng: np.random.Generator
) -> RiskPath:
    """At-risk path from y0 independent exponential termination times."""
    if y0 < 0:
        raise InvalidInputError("y0 must be nonnegative")
    if termination_mean <= 0:
        raise InvalidInputError("termination mean must be positive")
    domain = TimeInterval(0.0, horizon)
    if y0 == 0:
        return RiskPath(StepFunction.constant(0.0, domain))
    terms = rng.exponential(termination_mean, size=y0)
    terms = np.sort(terms[terms <= horizon])
    times, counts = np.unique(terms, return_counts=True)
    remaining = y0 - np.cumsum(counts)
    return RiskPath(StepFunction(float(y0), times, remaining.astype(float), domain))


def simulate_counting(
    model: IntensityModel, risk: RiskPath, rng: np.random.Generator
) -> CountingPath:
    """Point process with intensity rate(t) * Y(t), simulated by thinning.

    Each constancy segment of Y gets a dominating homogeneous process at
    the segment's exact rate maximum; Y itself is not changed by events.
    """
    if risk.domain.end > 1.0:
        raise InvalidInputError("risk path extends beyond the model domain [0, 1]")
    starts, ends, values = risk.segments()
    live = (values >= 1.0) & (ends > starts)
    starts, ends, values = starts[live], ends[live], values[live]
    if starts.size == 0:
        return CountingPath(np.empty(0), np.empty(0, dtype=np.int64))
    caps = np.array(
        [model.max_rate_on(u, v) for u, v in zip(starts, ends)], dtype=float
    )
    counts = rng.poisson(values * caps * (ends - starts))
    seg = np.repeat(np.arange(starts.size), counts)
    t = starts[seg] + rng.random(seg.size) * (ends - starts)[seg]
    keep = rng.random(seg.size) * caps[seg] <= model.rate(t)
    t = np.sort(t[keep])
    times, mult = np.unique(t, return_counts=True)
    return CountingPath(times, mult)


def _first_crossing(model: IntensityModel, lo: float, hi: float, level: float) -> float:
    """Time in [lo, hi] where the increasing integral first exceeds ``level``."""
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if model.integral(mid) > level:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def classify_band(band: ConfidenceBand, model: IntensityModel, s: TimeInterval) -> str:
    """Covered / left miss / right miss of the true curve over S.

    Band edges are piecewise constant and the true integral is continuous
    and increasing, so on each constancy segment a lower-edge violation
    can only start at the segment's left end and an upper-edge violation
    can only be confirmed at its right end.  When both edges are violated
    the earlier violation time decides (ties go left).
    """
    starts, lo, hi = band.edge_segments()
    ends = np.concatenate((starts[1:], [s.end]))
    a_start = np.asarray(model.integral(starts))
    a_end = np.asarray(model.integral(ends))

    below = a_start < lo
    t_left = float(starts[below][0]) if np.any(below) else None

    above = a_end > hi
    t_right = None
    if np.any(above):
        i = int(np.argmax(above))
        if a_start[i] > hi[i]:
            t_right = float(starts[i])
        else:
            t_right = _first_crossing(model, float(starts[i]), float(ends[i]), float(hi[i]))

    if t_left is None and t_right is None:
        return COVERED
    if t_right is None:
        return LEFT_MISS
    if t_left is None:
        return RIGHT_MISS
    return LEFT_MISS if t_left <= t_right else RIGHT_MISS


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol for one coverage experiment.

    ``termination_mean`` is the mean of the exponential censoring times;
    the default keeps roughly four fifths of the initial cohort at risk
    through the end of the unit study window, which is the regime the
    published coverage figures for this benchmark correspond to.
    """

    alphas: tuple = ALPHA_ORDER
    y0_values: tuple = (25, 50, 75)
    methods: tuple = ("HW", "EP", "B1", "B2")
    iterations: int = 10_000
    b_resamples: int = 200
    theta: float = 0.05
    s: TimeInterval = field(default_factory=lambda: TimeInterval(0.2, 0.8))
    termination_mean: float = 4.0
    horizon: float = 1.0
    master_seed: int = 0
    table_paths: int = 120_000
    table_points_per_block: int = 128
    table_blocks: int = 48

    def __post_init__(self):
        for name in self.alphas:
            if name not in ALPHA_ORDER:
                raise InvalidInputError(f"unknown intensity {name!r}")
        for method in self.methods:
            if method not in METHOD_ORDER:
                raise InvalidInputError(f"unknown method {method!r}")
        if self.iterations < 0 or self.b_resamples < 1:
            raise InvalidInputError("counts must be positive")
        if not (0.0 <= self.s.start and self.s.end <= self.horizon <= 1.0):
            raise InvalidInputError("band interval must sit inside [0, horizon]")


@dataclass(frozen=True)
class CellResult:
    """Outcome counts for one (intensity, y0, method) cell."""

    alpha: str
    y0: int
    method: str
    covered: int
    left: int
    right: int
    degenerate: int
    iterations: int

    def __post_init__(self):
        total = self.covered + self.left + self.right + self.degenerate
        if total != self.iterations:
            raise InvalidInputError("cell counts do not add up to the iteration count")

    def _pct(self, count: int) -> float:
        return 100.0 * count / self.iterations if self.iterations else 0.0

    @property
    def coverage_pct(self) -> float:
        return self._pct(self.covered)

    @property
    def left_pct(self) -> float:
        return self._pct(self.left)

    @property
    def right_pct(self) -> float:
        return self._pct(self.right)

    @property
    def degenerate_pct(self) -> float:
        return self._pct(self.degenerate)


@dataclass(frozen=True)
class CoverageTable:
    """Cell results in configuration order."""

    rows: tuple
    iterations: int

    def cell(self, alpha: str, y0: int, method: str) -> CellResult:
        for row in self.rows:
            if (row.alpha, row.y0, row.method) == (alpha, y0, method):
                return row
        raise KeyError((alpha, y0, method))


def _trial_rng(master_seed: int, alpha: str, y0: int, method: str, iteration: int):
    seed = np.random.SeedSequence(
        (
            master_seed,
            ALPHA_ORDER.index(alpha),
            y0,
            METHOD_ORDER.index(method),
            iteration,
        )
    )
    return np.random.default_rng(seed)


def _build_band(method, estimate, events, risk, settings, rng, tables):
    if method in bands_mod.BOOTSTRAP_METHODS:
        return bands_mod.bootstrap_band(estimate, events, risk, settings, rng)
    weight = bands_mod._base_weight(method)
    lookup = tables[weight].lookup
    k_lookup = lambda w, c1, c2: lookup(c1, c2)
    if method in bands_mod.ASYMPTOTIC_METHODS:
        return bands_mod.asymptotic_band(estimate, settings, k_lookup=k_lookup)
    return bands_mod.transformed_band(estimate, settings, k_lookup=k_lookup)


def run_cell(
    config: ExperimentConfig, alpha: str, y0: int, method: str, tables
) -> CellResult:
    """Run all iterations of one table cell."""
    model = INTENSITIES[alpha]
    settings = BandSettings(
        method=method, theta=config.theta, s=config.s, b_resamples=config.b_resamples
    )
    counts = {COVERED: 0, LEFT_MISS: 0, RIGHT_MISS: 0, "degenerate": 0}
    for it in range(config.iterations):
        rng = _trial_rng(config.master_seed, alpha, y0, method, it)
        risk = generate_risk_path(y0, config.termination_mean, config.horizon, rng)
        events = simulate_counting(model, risk, rng)
        estimate = nelson_aalen(events, risk)
        try:
            band = _build_band(method, estimate, events, risk, settings, rng, tables)
        except DegenerateBandError:
            counts["degenerate"] += 1
            continue
        counts[classify_band(band, model, config.s)] += 1
    return CellResult(
        alpha=alpha,
        y0=y0,
        method=method,
        covered=counts[COVERED],
        left=counts[LEFT_MISS],
        right=counts[RIGHT_MISS],
        degenerate=counts["degenerate"],
        iterations=config.iterations,
    )


def build_tables(config: ExperimentConfig) -> dict:
    """Bridge sup-quantile tables for the weights the methods need."""
    tables = {}
    needed = set()
    for method in config.methods:
        if method not in bands_mod.BOOTSTRAP_METHODS:
            needed.add(bands_mod._base_weight(method))
    for weight in sorted(needed):
        seed = np.random.SeedSequence(
            (config.master_seed, _TABLE_SEED_TAG, (HW_WEIGHT, EP_WEIGHT).index(weight))
        )
        tables[weight] = build_sup_quantile_table(
            weight,
            config.theta,
            np.random.default_rng(seed),
            paths=config.table_paths,
            points_per_block=config.table_points_per_block,
            n_blocks=config.table_blocks,
        )
    return tables


def _run_cell_task(args):
    return run_cell(*args)


def coverage_experiment(config: ExperimentConfig, threads: int = 1) -> CoverageTable:
    """Coverage table over all (intensity, y0, method) cells of ``config``.

    Results are identical for any ``threads`` value: every trial's random
    stream is derived from the cell identity and iteration index alone.
    """
    if config.iterations == 0:
        return CoverageTable(rows=(), iterations=0)
    tables = build_tables(config)
    cells = [
        (config, alpha, y0, method)
        for alpha in config.alphas
        for y0 in config.y0_values
        for method in config.methods
    ]
    args = [(config, a, y, m, tables) for (config, a, y, m) in cells]
    if threads > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_cell_task, args))
    else:
        rows = [run_cell(*a) for a in args]
    return CoverageTable(rows=tuple(rows), iterations=config.iterations)
