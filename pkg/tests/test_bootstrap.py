import numpy as np
import pytest

from hazband.bootstrap import (
    SupStatistics,
    WeirdReplicate,
    resample_increment_matrix,
    sup_statistics_batch,
    sup_statistics_batch_studentized,
    t_star_extrema,
    weird_resample,
)
from hazband.errors import DomainError
from hazband.process import CountingPath, nelson_aalen
from hazband.stepfun import TimeInterval, cumulative_steps

from conftest import make_risk


def test_certain_jump_always_resampled():
    events = CountingPath(np.array([1.0]), np.array([1]))
    risk = make_risk(1, [1.0], [0.0], 2.0)
    rng = np.random.default_rng(0)
    for _ in range(50):
        rep = weird_resample(events, risk, rng)
        assert rep.counts.tolist() == [1]


def test_no_jumps_resample():
    events = CountingPath(np.empty(0), np.empty(0, dtype=np.int64))
    risk = make_risk(3, [], [], 1.0)
    rep = weird_resample(events, risk, np.random.default_rng(1))
    assert rep.counts.size == 0
    assert rep.cum_hazard_star(0.5) == 0.0


def test_replicate_counts_within_bounds_and_deterministic(simple_pair):
    events, risk = simple_pair
    y = risk.at_risk_many(events.times)
    a = weird_resample(events, risk, np.random.default_rng(42))
    b = weird_resample(events, risk, np.random.default_rng(42))
    assert np.array_equal(a.counts, b.counts)
    for _ in range(200):
        rep = weird_resample(events, risk, np.random.default_rng(_))
        assert np.all(rep.counts >= 0) and np.all(rep.counts <= y)


def test_binomial_mean_identity(simple_pair):
    # sample mean of resampled increments matches the binomial mean
    # within four standard errors
    events, risk = simple_pair
    n = 100_000
    counts = resample_increment_matrix(events, risk, n, np.random.default_rng(9))
    y = risk.at_risk_many(events.times).astype(float)
    p = events.increments / y
    se = np.sqrt(y * p * (1 - p) / n)
    assert np.all(np.abs(counts.mean(axis=0) - events.increments) <= 4 * se)


def test_conditional_mean_and_variance_of_hazard(simple_pair):
    events, risk = simple_pair
    est = nelson_aalen(events, risk)
    n = 100_000
    counts = resample_increment_matrix(events, risk, n, np.random.default_rng(11))
    y = risk.at_risk_many(events.times).astype(float)
    inc_star = counts / y
    d_hat = events.increments / y
    # increment mean = dA, increment variance = dA(1-dA)/y
    var_target = d_hat * (1 - d_hat) / y
    se_mean = np.sqrt(var_target / n)
    assert np.all(np.abs(inc_star.mean(axis=0) - d_hat) <= 4 * se_mean)
    var_obs = inc_star.var(axis=0)
    # SE of a sample variance ~ var * sqrt(2/(n-1)) for near-normal;
    # binomial kurtosis correction is tiny at these sizes
    se_var = var_target * np.sqrt(2.0 / (n - 1)) * 2.0
    assert np.all(np.abs(var_obs - var_target) <= 4 * se_var)
    # cumulative: E[A*(t) | data] = A(t)
    a_star = np.cumsum(inc_star, axis=1)
    totals = np.concatenate(([0.0], est.cum_hazard.values))
    se_tot = np.sqrt(np.cumsum(var_target) / n)
    assert np.all(np.abs(a_star.mean(axis=0) - totals[1:]) <= 4 * se_tot)


def test_identical_replicate_gives_zero_stats(simple_pair):
    events, risk = simple_pair
    est = nelson_aalen(events, risk)
    y = risk.at_risk_many(events.times).astype(float)
    rep = WeirdReplicate(
        jump_times=events.times,
        counts=events.increments.copy(),
        cum_hazard_star=cumulative_steps(events.times, events.increments / y, risk.domain),
    )
    st = t_star_extrema(rep, est, TimeInterval(0.5, 2.5))
    assert (st.sup_abs, st.min_t, st.max_t) == (0.0, 0.0, 0.0)


def test_t_star_hand_example():
    # one jump at 0.5 with y=4, d=1; replicate draws 2.
    # T* right of the jump: (0.5 - 0.25)/sqrt(3/64) = 2/sqrt(3)
    events = CountingPath(np.array([0.5]), np.array([1]))
    risk = make_risk(4, [0.5], [3.0], 1.0)
    est = nelson_aalen(events, risk)
    rep = WeirdReplicate(
        jump_times=events.times,
        counts=np.array([2]),
        cum_hazard_star=cumulative_steps(np.array([0.5]), np.array([0.5]), risk.domain),
    )
    st = t_star_extrema(rep, est, TimeInterval(0.4, 1.0))
    expected = 2.0 / np.sqrt(3.0)
    assert st.max_t == pytest.approx(expected, abs=1e-12)
    assert st.sup_abs == pytest.approx(expected, abs=1e-12)
    assert st.min_t == 0.0  # sigma = 0 before the jump


def test_interval_left_of_first_jump_is_zero():
    events = CountingPath(np.array([0.9]), np.array([1]))
    risk = make_risk(4, [0.9], [3.0], 1.0)
    est = nelson_aalen(events, risk)
    rep = weird_resample(events, risk, np.random.default_rng(2))
    st = t_star_extrema(rep, est, TimeInterval(0.1, 0.5))
    assert (st.sup_abs, st.min_t, st.max_t) == (0.0, 0.0, 0.0)


def test_interval_outside_domain_rejected(simple_pair):
    events, risk = simple_pair
    est = nelson_aalen(events, risk)
    rep = weird_resample(events, risk, np.random.default_rng(3))
    with pytest.raises(DomainError):
        t_star_extrema(rep, est, TimeInterval(0.5, 4.0))


def test_sup_statistics_invariants():
    with pytest.raises(Exception):
        SupStatistics(sup_abs=1.0, min_t=2.0, max_t=1.0)


def _slow_sup_stats(a_star_cum, counts, y, est, s, studentized):
    """Reference implementation: walk every segment per replicate."""
    times = est.jump_times
    out = []
    for r in range(a_star_cum.shape[0]):
        vals = []
        # segment in force at s.start plus every jump in (start, end]
        points = [s.start] + [t for t in times if s.start < t <= s.end]
        for x in points:
            k = np.searchsorted(times, x, side="right") - 1
            a_hat = est.cum_hazard.values[k] if k >= 0 else 0.0
            a_st = a_star_cum[r, k] if k >= 0 else 0.0
            if studentized:
                v = np.sum((counts[r, : k + 1] * (y[: k + 1] - counts[r, : k + 1]))
                           / y[: k + 1] ** 3) if k >= 0 else 0.0
            else:
                v = est.variance.values[k] if k >= 0 else 0.0
            sig = np.sqrt(v)
            vals.append(0.0 if sig == 0 else (a_st - a_hat) / sig)
        out.append((min(vals), max(vals)))
    return np.array(out)


@pytest.mark.parametrize("studentized", [False, True])
def test_batch_sup_statistics_match_reference(studentized):
    rng = np.random.default_rng(17)
    times = np.array([0.1, 0.3, 0.55, 0.7, 0.95])
    events = CountingPath(times, np.array([1, 2, 1, 1, 1]))
    risk = make_risk(12, times, [10, 8, 7, 5, 4], 1.0)
    est = nelson_aalen(events, risk)
    counts = resample_increment_matrix(events, risk, 64, rng)
    y = risk.at_risk_many(times).astype(float)
    a_star = np.cumsum(counts / y, axis=1)
    s = TimeInterval(0.2, 0.8)
    if studentized:
        sup, mn, mx = sup_statistics_batch_studentized(a_star, counts, y, est, s)
    else:
        sup, mn, mx = sup_statistics_batch(a_star, est, s)
    ref = _slow_sup_stats(a_star, counts, y, est, s, studentized)
    assert np.allclose(mn, ref[:, 0], atol=1e-12)
    assert np.allclose(mx, ref[:, 1], atol=1e-12)
    assert np.allclose(sup, np.maximum(np.abs(ref[:, 0]), np.abs(ref[:, 1])), atol=1e-12)
