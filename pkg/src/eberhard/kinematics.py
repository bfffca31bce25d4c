"""Tachyon speeds seen from the lab for a moving preferred frame.

All speeds are in units of c, all angles in radians.  ``theta`` is the angle
between the preferred-frame velocity and the lab East-West axis (A -> B).
Functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SIDEREAL_DAY = 86164.0905  # s
POLE_TOL = 1e-12


@dataclass(frozen=True)
class PreferredFrame:
    beta: float
    chi: float = math.pi / 2
    phi0: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if not 0.0 <= self.chi <= math.pi:
            raise ValueError(f"chi must be in [0, pi], got {self.chi}")
        object.__setattr__(self, "phi0", self.phi0 % (2 * math.pi))


@dataclass(frozen=True)
class TachyonSpeed:
    beta_t: float

    def __post_init__(self):
        if not self.beta_t > 1.0:
            raise ValueError(f"beta_t must exceed 1, got {self.beta_t}")


@dataclass(frozen=True)
class SiderealClock:
    T: float = SIDEREAL_DAY
    omega: float = field(init=False)

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"sidereal day must be positive, got {self.T}")
        object.__setattr__(self, "omega", 2 * math.pi / self.T)


def c_factor(pf: PreferredFrame, ts: TachyonSpeed, theta):
    """Cosine of the preferred-frame emission angle of a tachyon moving along +x."""
    b, bt = pf.beta, ts.beta_t
    cos_t = np.cos(theta)
    sin2 = np.sin(theta) ** 2
    q = 1.0 - b * b * cos_t * cos_t
    root = np.sqrt((bt * bt - 1.0) * q + 1.0 - b * b)
    return (-b * sin2 + cos_t * math.sqrt(1.0 - b * b) * root) / (bt * q)


def _denominator(pf, ts, theta):
    return 1.0 + pf.beta * ts.beta_t * c_factor(pf, ts, theta)


def inverse_forward_speed(pf: PreferredFrame, ts: TachyonSpeed, theta):
    """c / v_t+(theta).  Finite everywhere; passes through 0 at the pole of v_t+."""
    d = _denominator(pf, ts, theta)
    return d / np.sqrt(d * d + (ts.beta_t**2 - 1.0) * (1.0 - pf.beta**2))


def inverse_backward_speed(pf: PreferredFrame, ts: TachyonSpeed, theta):
    return inverse_forward_speed(pf, ts, np.pi - np.asarray(theta))


def forward_speed(pf: PreferredFrame, ts: TachyonSpeed, theta, pole_tol: float = POLE_TOL):
    """Lab-frame speed of a tachyon from A to B.

    Negative values are physical (arrival clock reading precedes emission under
    Einstein synchronization).  Where the denominator is within ``pole_tol`` of
    zero the speed is returned as a signed infinity.
    """
    d = _denominator(pf, ts, theta)
    num = np.sqrt(d * d + (ts.beta_t**2 - 1.0) * (1.0 - pf.beta**2))
    at_pole = np.abs(d) < pole_tol
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(at_pole, np.copysign(np.inf, d), num / np.where(at_pole, 1.0, d))
    return v[()] if np.ndim(v) == 0 else v


def backward_speed(pf: PreferredFrame, ts: TachyonSpeed, theta, pole_tol: float = POLE_TOL):
    return forward_speed(pf, ts, np.pi - np.asarray(theta), pole_tol)


def first_order_inverse_forward(pf: PreferredFrame, ts: TachyonSpeed, theta):
    """beta cos(theta) + a(beta, theta) / beta_t, the 1/beta_t expansion of c/v_t+."""
    b = pf.beta
    cos_t = np.cos(theta)
    a = math.sqrt(1.0 - b * b) * np.sqrt(1.0 - b * b * cos_t * cos_t)
    return b * cos_t + a / ts.beta_t


def theta_of_time(pf: PreferredFrame, clock: SiderealClock, t):
    """Angle between the frame velocity and the East-West axis at sidereal time t."""
    arg = -math.sin(pf.chi) * np.sin(clock.omega * np.asarray(t) + pf.phi0)
    return np.arccos(np.clip(arg, -1.0, 1.0))
