"""No-correlation windows and the detectable tachyon-speed bound."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .kinematics import (
    PreferredFrame,
    SiderealClock,
    TachyonSpeed,
    inverse_backward_speed,
    inverse_forward_speed,
    theta_of_time,
)

ORACLE_BT_MAX = 1e10


class BracketError(ValueError):
    """Raised when the rectangle-fit condition holds at both ends of the search range."""


@dataclass(frozen=True)
class PathBudget:
    positioning: float
    coherence: float
    polarizer_layer: float

    def __post_init__(self):
        for name in ("positioning", "coherence", "polarizer_layer"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Geometry:
    d_ab: float
    delta: float = 0.0
    delta_err: float = 0.0

    def __post_init__(self):
        if not self.d_ab > 0:
            raise ValueError(f"d_ab must be positive, got {self.d_ab}")
        if self.delta_err < 0:
            raise ValueError(f"delta_err must be non-negative, got {self.delta_err}")

    @property
    def rho(self) -> float:
        return self.delta / self.d_ab

    @property
    def rho_bar(self) -> float:
        return self.delta_err / self.d_ab


@dataclass(frozen=True)
class RhoInterval:
    lo: float
    hi: float


@dataclass(frozen=True)
class ThetaInterval:
    theta1: float
    theta2: float


@dataclass
class BoundMap:
    betas: np.ndarray
    chis: np.ndarray
    values: np.ndarray  # shape (len(betas), len(chis))

    def rows(self):
        for i, b in enumerate(self.betas):
            for j, c in enumerate(self.chis):
                yield float(b), float(c), float(self.values[i, j])

    def argmin(self):
        i, j = np.unravel_index(np.argmin(self.values), self.values.shape)
        return float(self.betas[i]), float(self.chis[j]), float(self.values[i, j])


def coherence_length(lam: float, dlam: float) -> float:
    if dlam <= 0:
        raise ValueError(f"bandwidth must be positive, got {dlam}")
    return lam * lam / dlam


def path_uncertainty(budget: PathBudget) -> float:
    # worst-case linear sum; 40 + 16 + 220 um reproduces the quoted ~280 um
    return budget.positioning + budget.coherence + budget.polarizer_layer


def rho_window(pf: PreferredFrame, ts: TachyonSpeed, theta) -> RhoInterval:
    """Range of rho for which neither tachyon arrives before the partner photon."""
    return RhoInterval(-inverse_backward_speed(pf, ts, theta), inverse_forward_speed(pf, ts, theta))


def no_correlation(geometry: Geometry, pf: PreferredFrame, ts: TachyonSpeed, theta):
    w = rho_window(pf, ts, theta)
    rho = geometry.rho
    return (w.lo < rho) & (rho < w.hi)


def _edge_shift(rho_bar, dt, pf, clock):
    if rho_bar < 0 or rho_bar >= 1:
        raise ValueError(f"rho_bar must be in [0, 1), got {rho_bar}")
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    return pf.beta * math.sin(pf.chi) * math.sin(clock.omega * dt / 2)


def beta_t_min(rho_bar: float, dt: float, pf: PreferredFrame, clock: SiderealClock) -> float:
    """Largest tachyon speed whose no-correlation window an experiment with
    path uncertainty ``rho_bar`` and acquisition time ``dt`` would resolve.

    Returns ``math.inf`` when the bound is unbounded (rho_bar = 0 and no
    rotation-induced shift).
    """
    b = pf.beta
    den = rho_bar + _edge_shift(rho_bar, dt, pf, clock)
    if den <= 0:
        return math.inf
    return math.sqrt(1.0 + (1.0 - b * b) * (1.0 - rho_bar**2) / den**2)


def edge_angles(dt: float, pf: PreferredFrame, clock: SiderealClock):
    """(theta1, theta2): angles at -dt/2 and +dt/2 around the theta = pi/2 crossing."""
    s = math.sin(pf.chi) * math.sin(clock.omega * dt / 2)
    return math.acos(s), math.acos(-s)


def rectangle_slack(rho_bar, dt, pf, ts, clock) -> float:
    """c/v+(theta2) + c/v-(theta1) - 2 rho_bar; positive when the rectangle fits."""
    th1, th2 = edge_angles(dt, pf, clock)
    return float(inverse_forward_speed(pf, ts, th2) + inverse_backward_speed(pf, ts, th1)) - 2 * rho_bar


def rectangle_margin(rho_bar, dt, pf, ts, clock, n: int = 2001) -> float:
    """Smallest clearance between the +-rho_bar band and the window edges over [theta1, theta2]."""
    th1, th2 = edge_angles(dt, pf, clock)
    theta = np.linspace(th1, th2, n)
    w = rho_window(pf, ts, theta)
    return float(min(np.min(w.hi - rho_bar), np.min(-rho_bar - w.lo)))


def beta_t_min_oracle(
    rho_bar: float,
    dt: float,
    pf: PreferredFrame,
    clock: SiderealClock,
    rtol: float = 1e-9,
    check_containment: bool = True,
) -> float:
    """Critical beta_t from bisection of the rectangle-fit condition.

    Independent of the closed form: it evaluates the exact lab-frame tachyon
    speeds at the window edges and bisects in log(beta_t) over (1, 1e10].
    """
    _edge_shift(rho_bar, dt, pf, clock)

    def slack(bt):
        return rectangle_slack(rho_bar, dt, pf, TachyonSpeed(bt), clock)

    lo, hi = 1.0 + 1e-12, ORACLE_BT_MAX
    if slack(hi) > 0:
        raise BracketError("rectangle fits even at beta_t = 1e10; bound is unbounded")
    if slack(lo) <= 0:
        raise BracketError("rectangle does not fit even as beta_t -> 1")
    llo, lhi = math.log(lo), math.log(hi)
    while lhi - llo > rtol:
        mid = 0.5 * (llo + lhi)
        if slack(math.exp(mid)) > 0:
            llo = mid
        else:
            lhi = mid
    bt = math.exp(0.5 * (llo + lhi))

    if check_containment:
        below = TachyonSpeed(max(bt * (1 - 1e-6), 1 + 1e-12))
        margin = rectangle_margin(rho_bar, dt, pf, below, clock)
        if margin < -1e-9:
            warnings.warn(
                f"window edge dips inside the rectangle between theta1 and theta2 "
                f"(margin {margin:.3e}) at beta={pf.beta}, chi={pf.chi}",
                RuntimeWarning,
                stacklevel=2,
            )
    return bt


def theta_intervals(geometry: Geometry, pf: PreferredFrame, ts: TachyonSpeed, n: int = 20001, tol: float = 1e-12):
    """Maximal theta sub-intervals of [0, pi] with no correlation."""
    theta = np.linspace(0.0, math.pi, n)
    mask = np.asarray(no_correlation(geometry, pf, ts, theta))
    f = lambda th: bool(no_correlation(geometry, pf, ts, th))
    return [ThetaInterval(a, b) for a, b in _runs(theta, mask, f, tol)]


def _refine(f, a, b, tol):
    # f(a) != f(b); shrink to the switch point
    fa = f(a)
    while b - a > tol:
        m = 0.5 * (a + b)
        if f(m) == fa:
            a = m
        else:
            b = m
    return 0.5 * (a + b)


def _runs(x, mask, f, tol):
    """Refined [start, end] pairs of True runs in a sampled mask over grid x."""
    out = []
    if not mask.any():
        return out
    edges = np.flatnonzero(np.diff(mask.astype(np.int8)))
    start = x[0] if mask[0] else None
    for k in edges:
        edge = _refine(f, x[k], x[k + 1], tol)
        if mask[k]:
            out.append((start, edge))
            start = None
        else:
            start = edge
    if start is not None:
        out.append((start, x[-1]))
    return [(float(a), float(b)) for a, b in out]


def no_corr_time_intervals(
    geometry: Geometry,
    pf: PreferredFrame,
    ts: TachyonSpeed,
    clock: SiderealClock,
    n_samples: int = 100_000,
    tol: float = 1e-3,
):
    """No-correlation time intervals within one sidereal day.

    Each interval is ``(t_start, t_end)`` with ``0 <= t_start < T``.  An
    interval that runs through t = T continues into the next day, so its
    ``t_end`` exceeds ``T``.  ``[(0, T)]`` means the whole day.
    """
    T = clock.T
    f = lambda t: bool(no_correlation(geometry, pf, ts, theta_of_time(pf, clock, t)))
    t = np.linspace(0.0, T, n_samples + 1)
    mask = np.asarray(no_correlation(geometry, pf, ts, theta_of_time(pf, clock, t)))
    if mask.all():
        return [(0.0, T)]
    runs = _runs(t, mask, f, tol)
    if mask[0] and mask[-1] and len(runs) > 1:
        first = runs.pop(0)
        last = runs.pop()
        runs.append((last[0], first[1] + T))
    return runs


def scan_bounds(betas, chis, rho_bar: float, dt: float, clock: SiderealClock) -> BoundMap:
    """beta_t_min over a (beta, chi) grid; unbounded cells hold inf."""
    betas = np.atleast_1d(np.asarray(betas, dtype=float))
    chis = np.atleast_1d(np.asarray(chis, dtype=float))
    if betas.size == 0 or chis.size == 0:
        raise ValueError("grids must be non-empty")
    if np.any((betas < 0) | (betas >= 1)):
        raise ValueError("beta grid must lie in [0, 1)")
    _edge_shift(rho_bar, dt, PreferredFrame(0.0), clock)
    b = betas[:, None]
    den = rho_bar + b * np.sin(chis)[None, :] * math.sin(clock.omega * dt / 2)
    with np.errstate(divide="ignore"):
        vals = np.sqrt(1.0 + (1.0 - b * b) * (1.0 - rho_bar**2) / den**2)
    vals = np.where(den > 0, vals, np.inf)
    return BoundMap(betas, chis, vals)
