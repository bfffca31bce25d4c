import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eberhard.optics import (
    PolarizerSettings,
    RateModel,
    hybrid_rate,
    qm_coincidence_prob,
    qm_rate,
    qm_rate_for,
    singles_prob,
    uncorrelated_prob,
    uncorrelated_rate,
)

angles = st.floats(-10.0, 10.0)
FIG4 = RateModel(1.14, 12.05, 0.3, 4.0)


def test_qm_prob_examples():
    q = math.pi / 4
    assert qm_coincidence_prob(PolarizerSettings(q, q, math.pi)) == pytest.approx(0.0, abs=1e-16)
    assert qm_coincidence_prob(PolarizerSettings(q, q, 0.0)) == pytest.approx(0.5)
    for phi in (0.0, 1.0, math.pi):
        assert qm_coincidence_prob(PolarizerSettings(0.0, 0.0, phi)) == pytest.approx(0.5)


@given(angles, angles, angles)
def test_qm_prob_bounds(g1, g2, phi):
    p = qm_coincidence_prob(PolarizerSettings(g1, g2, phi))
    assert -1e-15 <= p <= 0.5 + 1e-15
    assert p <= qm_coincidence_prob(PolarizerSettings(g1, g1, 0.0)) + 1e-15


def test_singles_and_factorization():
    assert singles_prob() == 0.5
    assert uncorrelated_prob() == 0.25


def test_rate_model_validation():
    with pytest.raises(ValueError):
        RateModel(a=0.1, n_dark=0.3)
    with pytest.raises(ValueError):
        RateModel(dt=0.0)
    with pytest.raises(ValueError):
        RateModel(b=-1.0)
    with pytest.raises(ValueError):
        PolarizerSettings(float("nan"))
    assert PolarizerSettings(phi_state=3 * math.pi).phi_state == pytest.approx(math.pi)


def test_qm_rate_examples():
    assert qm_rate(FIG4, math.pi) == pytest.approx(1.14)
    assert qm_rate(FIG4, 0.0) == pytest.approx(13.19)
    rm = RateModel(0.0, 10.0, 0.0)
    for phi in np.linspace(0, 2 * math.pi, 9):
        assert qm_rate(rm, phi) == pytest.approx(10.0 * math.cos(phi / 2) ** 2)


@given(angles)
def test_qm_rate_symmetry(phi):
    assert qm_rate(FIG4, phi) == pytest.approx(qm_rate(FIG4, -phi))
    assert qm_rate(FIG4, phi + 2 * math.pi) == pytest.approx(qm_rate(FIG4, phi))


@given(st.floats(0.0, 2 * math.pi))
def test_general_rate_reduces_at_45_degrees(phi):
    pol = PolarizerSettings(math.pi / 4, math.pi / 4, phi)
    assert qm_rate_for(FIG4, pol) == pytest.approx(qm_rate(FIG4, phi), abs=1e-12)


def test_uncorrelated_rate():
    assert uncorrelated_rate(FIG4) == pytest.approx(7.165)
    assert uncorrelated_rate(FIG4) * FIG4.dt == pytest.approx(28.66)
    assert uncorrelated_rate(RateModel(0.0, 8.0, 0.0)) == 4.0
    assert uncorrelated_rate(RateModel(0.0, 0.0, 0.0)) == 0.0


def test_expected_variation_against_reported():
    # uncorrelated level minus the measured one-day average, versus the quoted 23
    dn = uncorrelated_rate(FIG4) * 4.0 - 4.58
    assert dn == pytest.approx(24.08, abs=0.01)
    assert abs(dn - 23) / 23 < 0.10


def test_hybrid_rate():
    assert hybrid_rate(FIG4, 1.0, 1.0) == pytest.approx(qm_rate(FIG4, 1.0))
    assert hybrid_rate(FIG4, 1.0, 0.0) == pytest.approx(uncorrelated_rate(FIG4))
    assert hybrid_rate(FIG4, math.pi, 0.5) == pytest.approx(4.1525)
    with pytest.raises(ValueError):
        hybrid_rate(FIG4, 0.0, 1.5)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_hybrid_monotone_toward_qm(phi, e1, e2):
    lo, hi = sorted((e1, e2))
    target = qm_rate(FIG4, phi)
    assert abs(hybrid_rate(FIG4, phi, hi) - target) <= abs(hybrid_rate(FIG4, phi, lo) - target) + 1e-12
