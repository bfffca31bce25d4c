import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from eberhard.analysis import (
    FoldedSeries,
    detect,
    fit_rate_curve,
    fold,
    fold_days,
    interval_overlaps,
    poisson_gof,
    summary,
    summary_json,
)
from eberhard.optics import PolarizerSettings, RateModel
from eberhard.simulator import CoincidenceSeries, simulate, window_intervals

RM = RateModel(1.14, 12.05, 0.3, 4.0)
POL = PolarizerSettings()

count_tables = arrays(np.int64, st.tuples(st.integers(1, 6), st.integers(1, 40)), elements=st.integers(0, 60))


def test_fold_single_day_is_identity():
    s = CoincidenceSeries(np.array([[3, 1, 4, 1, 5]]), 4.0)
    f = fold(s)
    assert np.array_equal(f.mean, [3, 1, 4, 1, 5])
    assert np.all(f.n_days == 1) and np.all(f.std == 0)
    assert np.array_equal(f.phases, [0, 4, 8, 12, 16])


def test_fold_constant_series():
    f = fold(CoincidenceSeries(np.full((5, 10), 7), 4.0))
    assert np.all(f.mean == 7) and np.all(f.std == 0)


def test_fold_rejects_ragged():
    with pytest.raises(ValueError):
        fold_days([np.zeros(10), np.zeros(9)], 4.0)
    assert len(fold_days([np.zeros(10), np.ones(10)], 4.0)) == 10


@settings(max_examples=50)
@given(count_tables, st.data())
def test_fold_linear(a, data):
    b = data.draw(arrays(np.int64, a.shape, elements=st.integers(0, 60)))
    fa, fb = fold(CoincidenceSeries(a, 1.0)), fold(CoincidenceSeries(b, 1.0))
    fab = fold(CoincidenceSeries(a + b, 1.0))
    assert np.allclose(fab.mean, fa.mean + fb.mean)


@settings(max_examples=50)
@given(count_tables)
def test_fold_shapes(a):
    f = fold(CoincidenceSeries(a, 1.0))
    assert np.all(f.n_days == a.shape[0])
    assert np.all(f.mean >= 0)


def test_folded_sigma_21_days(qm_cfg):
    f = fold(simulate(qm_cfg))
    n_av, sigma, dn = summary(f)
    assert sigma == pytest.approx(math.sqrt(4.56 / 21), rel=0.05)
    assert 0.37 <= sigma <= 0.56
    assert abs(n_av - 4.56) < 3 * math.sqrt(4.56 / (21 * len(f)))
    # the reported 1.95 maximum departure is typical of ~21500 folded bins
    assert 1.4 < dn < 2.6


def test_sqrt_n_law(qm_cfg):
    sig = {m: summary(fold(simulate(dataclasses.replace(qm_cfg, n_days=m))))[1] for m in (4, 9, 16, 25)}
    for m, s in sig.items():
        assert s * math.sqrt(m) == pytest.approx(sig[4] * 2, rel=0.15)
        assert s == pytest.approx(math.sqrt(4.56 / m), rel=0.15)


def test_summary_constant_and_empty():
    assert summary(np.full(50, 3.0)) == (3.0, 0.0, 0.0)
    assert summary(np.array([])) == (0.0, 0.0, 0.0)
    f = fold(CoincidenceSeries(np.full((4, 8), 2), 4.0))
    assert summary(f) == (2.0, 0.0, 0.0)


def test_gof_qm_day(qm_cfg):
    g = poisson_gof(simulate(dataclasses.replace(qm_cfg, n_days=1)))
    assert g.frequencies.sum() == pytest.approx(1.0, abs=1e-12)
    assert g.raw_frequencies.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(g.expected * 21541 >= 5)
    assert g.p_value > 0.01
    assert g.dof == len(g.bins) - 2


def test_gof_constant_counts_rejected():
    g = poisson_gof(np.full(5000, 5))
    assert g.p_value < 1e-12


def test_gof_mixture_rejected(eberhard_cfg):
    s = simulate(dataclasses.replace(eberhard_cfg, n_days=1))
    assert poisson_gof(s).p_value < 1e-6


def test_gof_degenerate():
    with pytest.raises(ValueError):
        poisson_gof(np.zeros(3, dtype=int))
    with pytest.raises(ValueError):
        poisson_gof(np.array([], dtype=int))


@pytest.mark.slow
def test_gof_calibration(qm_cfg):
    """Under the null, p > 0.01 should hold in about 99% of seeds."""
    cfg = dataclasses.replace(qm_cfg, n_days=1)
    p = np.array([poisson_gof(simulate(dataclasses.replace(cfg, seed=s))).p_value for s in range(1000)])
    assert np.mean(p > 0.01) >= 0.99
    # p-values of a calibrated test are uniform
    assert stats.kstest(p, "uniform").pvalue > 1e-3


def test_detect_empty():
    f = FoldedSeries(np.array([]), np.array([]), np.array([]), np.array([]), 4.0)
    d = detect(f, RM, POL)
    assert d.flags == [] and d.intervals == [] and d.delta_n == 0.0


def test_detect_flags_and_merges():
    mean = np.full(20, 4.56)
    mean[5:8] = 28.66
    mean[12] = 28.66
    f = FoldedSeries(np.arange(20) * 4.0, mean, np.full(20, 21), np.zeros(20), 4.0)
    d = detect(f, RM, POL, 5.0)
    assert [k for k, _, _ in d.flags] == [5, 6, 7, 12]
    assert d.intervals == [(20.0, 32.0), (48.0, 52.0)]
    assert all(z >= 5.0 for _, _, z in d.flags)
    # (28.66 - 4.56) / sqrt(4.56 / 21) ~ 51.7
    assert d.flags[0][2] == pytest.approx((28.66 - 4.56) / math.sqrt(4.56 / 21))


def test_qm_false_positive_rate(qm_cfg):
    """Runs with any flag at z = 5 match the exact Poisson tail rate.

    The folded sum is Poisson(21 * 4.56); a bin flags when it reaches 145.
    """
    p_bin = stats.poisson.sf(144, 21 * 4.56)
    p_run = 1 - (1 - p_bin) ** 21541
    assert p_run == pytest.approx(0.036, abs=0.001)
    flagged = sum(
        bool(detect(fold(simulate(dataclasses.replace(qm_cfg, seed=s))), RM, POL, 5.0).flags) for s in range(100)
    )
    assert flagged <= stats.binom.ppf(0.999, 100, p_run)


def test_detect_injected_window(eberhard_cfg):
    f = fold(simulate(eberhard_cfg))
    d = detect(f, RM, POL, 5.0)
    truth = window_intervals(eberhard_cfg)
    assert d.intervals
    for iv in truth:
        assert any(interval_overlaps(found, iv, eberhard_cfg.clock.T) for found in d.intervals)


def test_detect_short_injected_window(qm_cfg):
    counts = simulate(qm_cfg).counts.copy()
    rng = np.random.default_rng(0)
    counts[:, 1000:1010] = rng.poisson(28.66, (21, 10))
    d = detect(fold(CoincidenceSeries(counts, 4.0)), RM, POL, 5.0)
    assert any(a <= 1000 * 4.0 < b or 1000 * 4.0 <= a < 1010 * 4.0 for a, b in d.intervals)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(0.0, 10.0))
def test_detect_monotone_in_threshold(z1, z2):
    rng = np.random.default_rng(1)
    mean = rng.poisson(4.56 * 21, 500) / 21
    f = FoldedSeries(np.arange(500) * 4.0, mean, np.full(500, 21), np.zeros(500), 4.0)
    lo, hi = sorted((z1, z2))
    a = {k for k, _, _ in detect(f, RM, POL, lo).flags}
    b = {k for k, _, _ in detect(f, RM, POL, hi).flags}
    assert b <= a


def test_summary_json_fields():
    mean = np.array([4.0, 5.0, 30.0])
    f = FoldedSeries(np.arange(3) * 4.0, mean, np.full(3, 21), np.zeros(3), 4.0)
    doc = json.loads(summary_json(f, detect(f, RM, POL)))
    assert set(doc) >= {"n_av", "sigma", "delta_n_max", "flags"}
    assert doc["n_av"] == pytest.approx(13.0)
    assert [fl["bin"] for fl in doc["flags"]] == [2]


def test_interval_overlaps_wraps():
    T = 100.0
    assert interval_overlaps((90.0, 110.0), (0.0, 5.0), T)
    assert interval_overlaps((0.0, 5.0), (90.0, 110.0), T)
    assert not interval_overlaps((20.0, 30.0), (40.0, 50.0), T)


def test_fit_rate_curve_recovers_coefficients():
    phi = np.linspace(0, 2 * math.pi, 40)
    a, b = fit_rate_curve(phi, 1.14 + 12.05 * np.cos(phi / 2) ** 2)
    assert a == pytest.approx(1.14) and b == pytest.approx(12.05)


def test_detect_merges_across_phase_zero():
    mean = np.full(10, 4.56)
    mean[[0, 1, 5, 8, 9]] = 28.66
    f = FoldedSeries(np.arange(10) * 4.0, mean, np.full(10, 21), np.zeros(10), 4.0)
    assert detect(f, RM, POL).intervals == [(20.0, 24.0), (32.0, 48.0)]
    mean[:] = 28.66
    assert detect(f, RM, POL).intervals == [(0.0, 40.0)]
