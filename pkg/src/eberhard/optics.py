"""Coincidence statistics: quantum, fully uncorrelated, and hybrid."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Fit of coincidence rate versus state phase (counts/s), and dark coincidences
FIT_A = 1.14
FIT_B = 12.05
N_DARK = 0.3


@dataclass(frozen=True)
class PolarizerSettings:
    gamma1: float = math.pi / 4
    gamma2: float = math.pi / 4
    phi_state: float = math.pi

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.gamma1, self.gamma2, self.phi_state)):
            raise ValueError("polarizer angles must be finite")
        object.__setattr__(self, "phi_state", self.phi_state % (2 * math.pi))


@dataclass(frozen=True)
class RateModel:
    a: float = FIT_A
    b: float = FIT_B
    n_dark: float = N_DARK
    dt: float = 4.0

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b must be non-negative")
        if not 0 <= self.n_dark <= self.a:
            raise ValueError("n_dark must lie in [0, a]")
        if not self.dt > 0:
            raise ValueError("dt must be positive")


def qm_coincidence_prob(p: PolarizerSettings) -> float:
    amp = (
        math.cos(p.gamma1) * math.cos(p.gamma2)
        + np.exp(1j * p.phi_state) * math.sin(p.gamma1) * math.sin(p.gamma2)
    )
    return float(abs(amp) ** 2 / 2)


def singles_prob() -> float:
    return 0.5


def uncorrelated_prob() -> float:
    return singles_prob() ** 2


def qm_rate(rm: RateModel, phi_state):
    return rm.a + rm.b * np.cos(np.asarray(phi_state) / 2) ** 2


def qm_rate_for(rm: RateModel, pol: PolarizerSettings) -> float:
    """QM rate for arbitrary polarizer axes; b is the rate at coincidence probability 1/2.

    Reduces to ``qm_rate(rm, pol.phi_state)`` at gamma1 = gamma2 = pi/4.
    """
    return rm.a + 2 * rm.b * qm_coincidence_prob(pol)


def uncorrelated_rate(rm: RateModel) -> float:
    return rm.a + rm.b / 2


def hybrid_rate(rm: RateModel, phi_state, eta: float):
    """Mixture of quantum (weight eta) and uncorrelated coincidence rates."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return eta * qm_rate(rm, phi_state) + (1 - eta) * uncorrelated_rate(rm)
