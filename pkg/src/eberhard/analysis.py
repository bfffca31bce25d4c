"""Sidereal folding, Poisson goodness of fit, and window detection."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .optics import PolarizerSettings, RateModel, qm_rate_for
from .simulator import CoincidenceSeries

DEFAULT_Z = 5.0


@dataclass
class FoldedSeries:
    phases: np.ndarray
    mean: np.ndarray
    n_days: np.ndarray
    std: np.ndarray
    dt: float

    def __len__(self):
        return self.mean.size

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["sidereal_s", "mean", "n_days", "std"])
            for row in zip(self.phases, self.mean, self.n_days, self.std):
                w.writerow([repr(float(row[0])), repr(float(row[1])), int(row[2]), repr(float(row[3]))])


@dataclass
class HistogramGof:
    bins: list  # (lo, hi) count ranges after merging; hi is None for the open tail
    frequencies: np.ndarray
    expected: np.ndarray  # Poisson probabilities per merged bin
    chi2: float
    dof: int
    p_value: float
    mean: float
    values: np.ndarray = field(default=None)  # raw count values 0..max
    raw_frequencies: np.ndarray = field(default=None)
    raw_pmf: np.ndarray = field(default=None)


@dataclass
class Detection:
    flags: list  # (bin index, phase s, z)
    delta_n: float
    intervals: list  # (t_start, t_end) in s


def fold(series: CoincidenceSeries) -> FoldedSeries:
    """Average counts at equal sidereal phase across days."""
    counts = np.asarray(series.counts)
    if counts.ndim != 2:
        raise ValueError("series counts must be a (days, bins) array")
    n = counts.shape[0]
    mean = counts.mean(axis=0)
    std = counts.std(axis=0, ddof=1) if n > 1 else np.zeros(counts.shape[1])
    return FoldedSeries(series.phases, mean, np.full(counts.shape[1], n), std, series.dt)


def fold_days(days, dt: float) -> FoldedSeries:
    """Fold a list of per-day count arrays; rejects ragged input."""
    lengths = {len(d) for d in days}
    if len(lengths) != 1:
        raise ValueError(f"days have different numbers of bins: {sorted(lengths)}")
    return fold(CoincidenceSeries(np.vstack(days), dt))


def _merge_bins(expected, min_expected):
    # greedy left-to-right; leftover tail joins the last group
    groups, cur, acc = [], [], 0.0
    for i, e in enumerate(expected):
        cur.append(i)
        acc += e
        if acc >= min_expected:
            groups.append(cur)
            cur, acc = [], 0.0
    if cur:
        if groups:
            groups[-1].extend(cur)
        else:
            groups.append(cur)
    return groups


def poisson_gof(series, min_expected: float = 5.0) -> HistogramGof:
    """Chi-square test of the count histogram against Poisson at the sample mean.

    Accepts a CoincidenceSeries or any array of counts.  Tail bins are merged
    until every expected count is at least ``min_expected``; one degree of
    freedom is spent on the estimated mean.
    """
    counts = np.asarray(getattr(series, "counts", series)).ravel()
    if counts.size == 0:
        raise ValueError("empty series")
    n = counts.size
    mean = float(counts.mean())
    kmax = int(counts.max())
    values = np.arange(kmax + 1)
    observed = np.bincount(counts, minlength=kmax + 1).astype(float)
    pmf = stats.poisson.pmf(values, mean)
    probs = pmf.copy()
    probs[-1] = stats.poisson.sf(kmax - 1, mean)  # open upper tail
    groups = _merge_bins(probs * n, min_expected)
    if len(groups) < 2:
        raise ValueError("fewer than 2 bins remain after merging")
    obs_g = np.array([observed[g].sum() for g in groups])
    exp_g = np.array([probs[g].sum() for g in groups])
    chi2 = float(np.sum((obs_g - n * exp_g) ** 2 / (n * exp_g)))
    dof = len(groups) - 2
    p = float(stats.chi2.sf(chi2, dof)) if dof > 0 else float("nan")
    bins = [(g[0], g[-1] if g[-1] < kmax else None) for g in groups]
    return HistogramGof(bins, obs_g / n, exp_g, chi2, dof, p, mean, values, observed / n, pmf)


def summary(data):
    """(n_av, sigma, delta_n) of a series or folded series.

    ``sigma`` is the scatter of the per-bin values about their average and
    ``delta_n`` the largest absolute departure from it.
    """
    if isinstance(data, FoldedSeries):
        x = data.mean
    else:
        x = np.asarray(getattr(data, "counts", data), dtype=float).ravel()
    if x.size == 0:
        return 0.0, 0.0, 0.0
    n_av = float(x.mean())
    sigma = float(x.std(ddof=1)) if x.size > 1 else 0.0
    return n_av, sigma, float(np.max(np.abs(x - n_av)))


def _merge_flags(idx, phases, dt):
    out = []
    for k in idx:
        if out and k == out[-1][1]:
            out[-1][1] = k + 1
        else:
            out.append([k, k + 1])
    ivs = [(float(phases[a]), float(phases[b - 1] + dt)) for a, b in out]
    # a run touching both ends of the fold is one interval crossing phase zero
    if len(out) > 1 and out[0][0] == 0 and out[-1][1] == len(phases):
        period = float(phases[-1] + dt)
        ivs = ivs[1:-1] + [(ivs[-1][0], ivs[0][1] + period)]
    return ivs


def detect(folded: FoldedSeries, rm: RateModel, pol: PolarizerSettings, z_threshold: float = DEFAULT_Z) -> Detection:
    """Flag bins whose folded mean sits above the QM expectation by z_threshold
    predicted Poisson standard errors sqrt(rate dt / N)."""
    if len(folded) == 0:
        return Detection([], 0.0, [])
    expect = qm_rate_for(rm, pol) * folded.dt
    sigma = np.sqrt(expect / folded.n_days)
    z = (folded.mean - expect) / sigma
    idx = np.flatnonzero(z >= z_threshold)
    flags = [(int(k), float(folded.phases[k]), float(z[k])) for k in idx]
    _, _, delta_n = summary(folded)
    return Detection(flags, delta_n, _merge_flags(idx, folded.phases, folded.dt))


def detection_csv(det: Detection, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin", "sidereal_s", "z"])
        for k, ph, z in det.flags:
            w.writerow([k, repr(ph), repr(z)])


def summary_json(folded: FoldedSeries, det: Detection = None) -> str:
    n_av, sigma, delta_n = summary(folded)
    doc = {
        "n_av": n_av,
        "sigma": sigma,
        "delta_n_max": delta_n,
        "flags": [{"bin": k, "sidereal_s": ph, "z": z} for k, ph, z in (det.flags if det else [])],
    }
    if det is not None:
        doc["intervals"] = [list(iv) for iv in det.intervals]
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def interval_overlaps(a, b, T: float) -> bool:
    """Whether two (start, end) intervals intersect on a circle of circumference T."""
    for shift in (-T, 0.0, T):
        if min(a[1], b[1] + shift) > max(a[0], b[0] + shift):
            return True
    return False


def fit_rate_curve(phi, rate):
    """Least-squares (a, b) for rate = a + b cos^2(phi / 2)."""
    phi = np.asarray(phi, dtype=float)
    X = np.column_stack([np.ones_like(phi), np.cos(phi / 2) ** 2])
    (a, b), *_ = np.linalg.lstsq(X, np.asarray(rate, dtype=float), rcond=None)
    return float(a), float(b)
