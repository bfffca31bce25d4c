"""Synthetic coincidence counts over sidereal days."""
from __future__ import annotations

import csv
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import stats

from .kinematics import PreferredFrame, SiderealClock, TachyonSpeed, theta_of_time
from .optics import PolarizerSettings, RateModel, qm_rate_for, uncorrelated_rate
from .window import Geometry, no_corr_time_intervals, no_correlation

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
SMALL_MEAN = 30.0


@dataclass(frozen=True)
class SimConfig:
    geometry: Geometry = Geometry(1.75)
    pf: Optional[PreferredFrame] = None
    ts: Optional[TachyonSpeed] = None
    rm: RateModel = RateModel()
    pol: PolarizerSettings = PolarizerSettings()
    clock: SiderealClock = SiderealClock()
    n_days: int = 21
    eta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_days < 1:
            raise ValueError("n_days must be at least 1")
        if (self.pf is None) != (self.ts is None):
            raise ValueError("pf and ts must be given together")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must be in [0, 1], got {self.eta}")

    @property
    def bins_per_day(self) -> int:
        return int(math.floor(self.clock.T / self.rm.dt))

    @property
    def eberhard(self) -> bool:
        return self.pf is not None


@dataclass
class CoincidenceSeries:
    counts: np.ndarray  # (n_days, bins_per_day), int64
    dt: float
    T: float = field(default=SiderealClock().T)

    @property
    def n_days(self) -> int:
        return self.counts.shape[0]

    @property
    def bins_per_day(self) -> int:
        return self.counts.shape[1]

    @property
    def phases(self) -> np.ndarray:
        return np.arange(self.bins_per_day) * self.dt

    def records(self):
        ph = self.phases
        for d in range(self.n_days):
            for k in range(self.bins_per_day):
                yield d, k, float(ph[k]), int(self.counts[d, k])

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["day", "bin", "sidereal_s", "count"])
            ph = self.phases
            for d in range(self.n_days):
                for k in range(self.bins_per_day):
                    w.writerow([d, k, repr(float(ph[k])), int(self.counts[d, k])])

    @classmethod
    def from_csv(cls, path, T: float = SiderealClock().T) -> "CoincidenceSeries":
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        if data.size == 0:
            raise ValueError(f"{path}: empty series")
        day = data[:, 0].astype(np.int64)
        k = data[:, 1].astype(np.int64)
        n_days = int(day.max()) + 1
        per_day = np.bincount(day, minlength=n_days)
        if np.any(per_day != per_day[0]):
            raise ValueError(f"{path}: days have different numbers of bins")
        counts = np.zeros((n_days, per_day[0]), dtype=np.int64)
        counts[day, k] = data[:, 3].astype(np.int64)
        ph = np.unique(data[:, 2])
        dt = float(ph[1] - ph[0]) if ph.size > 1 else float(T)
        return cls(counts, dt, T)


def _splitmix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(0xBF58476D1CE4E5B9)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def counter_uniforms(seed: int, day: int, bins) -> np.ndarray:
    """Uniforms in (0, 1), one per (seed, day, bin), independent of evaluation order."""
    bins = np.asarray(bins, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _splitmix(np.array([seed & _MASK64], dtype=np.uint64))
        key = _splitmix(key ^ (np.uint64(day & _MASK64) * _GOLDEN + np.uint64(1)))
        z = _splitmix(key ^ ((bins + np.uint64(1)) * _GOLDEN))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def poisson_inverse(u: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Poisson quantiles of u by sequential CDF inversion (means < 30) or scipy's ppf."""
    u = np.asarray(u, dtype=float)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), u.shape)
    out = np.zeros(u.shape, dtype=np.int64)

    small = np.flatnonzero(mu < SMALL_MEAN)
    if small.size:
        m, uu = mu.flat[small], u.flat[small]
        p = np.exp(-m)
        F = p.copy()
        k = np.zeros(small.size, dtype=np.int64)
        idx = np.flatnonzero((uu > F) & (m > 0))
        for _ in range(400):
            if idx.size == 0:
                break
            k[idx] += 1
            p[idx] *= m[idx] / k[idx]
            F[idx] += p[idx]
            idx = idx[uu[idx] > F[idx]]
        out.flat[small] = k

    large = np.flatnonzero(mu >= SMALL_MEAN)
    if large.size:
        out.flat[large] = stats.poisson.ppf(u.flat[large], mu.flat[large]).astype(np.int64)
    return out


@functools.lru_cache(maxsize=32)
def window_intervals(cfg: SimConfig):
    if not cfg.eberhard:
        return []
    return no_corr_time_intervals(cfg.geometry, cfg.pf, cfg.ts, cfg.clock)


def _rates(cfg: SimConfig):
    qm = qm_rate_for(cfg.rm, cfg.pol)
    inside = cfg.eta * qm + (1 - cfg.eta) * uncorrelated_rate(cfg.rm)
    return qm, inside


def window_overlap(cfg: SimConfig, start, width: float) -> np.ndarray:
    """Fraction of [start, start + width) inside a no-correlation window."""
    T = cfg.clock.T
    s = np.asarray(start, dtype=float) % T
    e = s + width
    cover = np.zeros_like(s)
    for a, b in window_intervals(cfg):
        for shift in (-T, 0.0, T):
            cover += np.clip(np.minimum(e, b + shift) - np.maximum(s, a + shift), 0.0, None)
    return np.minimum(cover / width, 1.0)


def expected_rate_at(cfg: SimConfig, t, width: Optional[float] = None):
    """Expected coincidence rate (counts/s) at sidereal time t.

    With ``width`` the rate is averaged over [t, t + width), weighting the two
    regimes by their overlap with the no-correlation windows.
    """
    qm, inside = _rates(cfg)
    if not cfg.eberhard:
        return np.full(np.shape(t), qm)[()]
    if width is None:
        tt = np.asarray(t, dtype=float) % cfg.clock.T
        mask = no_correlation(cfg.geometry, cfg.pf, cfg.ts, theta_of_time(cfg.pf, cfg.clock, tt))
        return np.where(mask, inside, qm)[()]
    frac = window_overlap(cfg, t, width)
    return (qm + frac * (inside - qm))[()]


def bin_means(cfg: SimConfig) -> np.ndarray:
    """Expected counts per bin over one sidereal day."""
    starts = np.arange(cfg.bins_per_day) * cfg.rm.dt
    return np.asarray(expected_rate_at(cfg, starts, cfg.rm.dt)) * cfg.rm.dt * np.ones(cfg.bins_per_day)


def simulate(cfg: SimConfig, workers: int = 1) -> CoincidenceSeries:
    mu = bin_means(cfg)
    bins = np.arange(cfg.bins_per_day)

    def one_day(day):
        return poisson_inverse(counter_uniforms(cfg.seed, day, bins), mu)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            rows = list(ex.map(one_day, range(cfg.n_days)))
    else:
        rows = [one_day(d) for d in range(cfg.n_days)]
    return CoincidenceSeries(np.vstack(rows), cfg.rm.dt, cfg.clock.T)
