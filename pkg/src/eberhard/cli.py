"""Command-line front end.

    eberhard bound    [--preset salart]
    eberhard window
    eberhard scan
    eberhard simulate
    eberhard fold     [--series PATH]
    eberhard detect   [--series PATH]
    eberhard report

Common flags: --config PATH, --set section.key=value (repeatable), --seed N,
--out DIR.  Exit codes: 1 config error, 2 numeric degeneracy, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, optics, simulator, window
from .config import ConfigError, RunConfig, load_config
from .kinematics import PreferredFrame

log = logging.getLogger("eberhard")

EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 1, 2, 3


class NumericDegeneracy(RuntimeError):
    pass


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    log.info("wrote %s", path)


def _bound_params(cfg: RunConfig, preset):
    if preset == "salart":
        return cfg.salart.rho_bar, cfg.salart.dt
    return cfg.geometry_obj().rho_bar, cfg.rates.dt


def _grid(cfg: RunConfig):
    s = cfg.scan
    betas = np.linspace(s.beta_min, s.beta_max, s.n_beta)
    chis = np.radians(np.linspace(s.chi_min_deg, s.chi_max_deg, s.n_chi))
    return betas, chis


# figure data


def bound_map(cfg: RunConfig, preset=None) -> window.BoundMap:
    rho_bar, dt = _bound_params(cfg, preset)
    betas, chis = _grid(cfg)
    return window.scan_bounds(betas, chis, rho_bar, dt, cfg.clock_obj())


def fig2_rows(cfg: RunConfig):
    pf, ts = cfg.frame_obj(), cfg.tachyon_obj()
    theta = np.linspace(0.0, math.pi, cfg.window.n_theta)
    w = window.rho_window(pf, ts, theta)
    mid = pf.beta * np.cos(theta)
    return list(zip(np.degrees(theta), w.lo, w.hi, mid))


def fig4_rows(cfg: RunConfig, n: int = 361):
    rm = cfg.rate_model()
    phi = np.linspace(0.0, 2 * math.pi, n)
    unc = optics.uncorrelated_rate(rm)
    return [(float(np.degrees(p)), float(optics.qm_rate(rm, p)), unc) for p in phi]


def fig7_rows(cfg: RunConfig):
    rho_bar, dt = _bound_params(cfg, None)
    chis = np.radians(np.linspace(0.0, 180.0, cfg.scan.n_chi))
    bm = window.scan_bounds(cfg.scan.fig7_betas, chis, rho_bar, dt, cfg.clock_obj())
    return [(b, math.degrees(c), v) for b, c, v in bm.rows()]


def fig8_rows(cfg: RunConfig):
    s = cfg.scan
    betas = np.geomspace(s.fig8_beta_min, s.fig8_beta_max, s.fig8_n)
    clock = cfg.clock_obj()
    ours = window.scan_bounds(betas, [math.pi / 2], *_bound_params(cfg, None), clock).values[:, 0]
    theirs = window.scan_bounds(betas, [math.pi / 2], *_bound_params(cfg, "salart"), clock).values[:, 0]
    return list(zip(betas, ours, theirs))


# commands


def cmd_bound(cfg: RunConfig, out: Path, preset=None):
    rho_bar, dt = _bound_params(cfg, preset)
    pf = cfg.frame_obj()
    bt = window.beta_t_min(rho_bar, dt, pf, cfg.clock_obj())
    bm = bound_map(cfg, preset)
    _write_csv(out / "bound_map.csv", ["beta", "chi", "beta_t_min"],
               ((b, math.degrees(c), v) for b, c, v in bm.rows()))
    b0, c0, v0 = bm.argmin()
    print(f"rho_bar = {rho_bar:.4g}, dt = {dt:g} s")
    if math.isinf(bt):
        print(f"beta_t_min (beta={pf.beta:g}, chi={math.degrees(pf.chi):g} deg) = unbounded")
    else:
        print(f"beta_t_min (beta={pf.beta:g}, chi={math.degrees(pf.chi):g} deg) = {bt:.6g}")
    print(f"grid minimum: beta_t_min = {v0:.6g} at beta={b0:g}, chi={math.degrees(c0):g} deg")
    if math.isinf(bt):
        raise NumericDegeneracy("bound is unbounded: rho_bar + beta sin(chi) sin(omega dt / 2) = 0")


def cmd_window(cfg: RunConfig, out: Path):
    rows = fig2_rows(cfg)
    _write_csv(out / "fig2_window.csv", ["theta_deg", "rho_lo", "rho_hi", "beta_cos_theta"], rows)
    geo, pf, ts, clock = cfg.geometry_obj(), cfg.frame_obj(), cfg.tachyon_obj(), cfg.clock_obj()
    th = window.theta_intervals(geo, pf, ts)
    _write_csv(out / "window_theta_intervals.csv", ["theta1_deg", "theta2_deg"],
               ((math.degrees(i.theta1), math.degrees(i.theta2)) for i in th))
    tiv = window.no_corr_time_intervals(geo, pf, ts, clock)
    _write_csv(out / "window_time_intervals.csv", ["t_start_s", "t_end_s"], tiv)
    envelope = max(r[2] for r in rows)
    print(f"window envelope: rho_hi max = {envelope:.4g}, rho_lo min = {min(r[1] for r in rows):.4g}")
    print(f"rho = {geo.rho:.4g}: {len(th)} theta interval(s), {len(tiv)} time interval(s) per sidereal day")
    for a, b in tiv:
        print(f"  {a:.3f} s -> {b:.3f} s")


def cmd_scan(cfg: RunConfig, out: Path):
    _write_csv(out / "fig7_bound_vs_chi.csv", ["beta", "chi", "beta_t_min"], fig7_rows(cfg))
    _write_csv(out / "fig8_bound_vs_beta.csv", ["beta", "beta_t_min", "beta_t_min_salart"], fig8_rows(cfg))
    print(f"wrote {out / 'fig7_bound_vs_chi.csv'} and {out / 'fig8_bound_vs_beta.csv'}")


def cmd_simulate(cfg: RunConfig, out: Path) -> simulator.CoincidenceSeries:
    series = simulator.simulate(cfg.sim_config(), workers=cfg.simulation.workers)
    series.to_csv(out / "series.csv")
    print(f"simulated {series.n_days} day(s) x {series.bins_per_day} bins, mean count {series.counts.mean():.4f}")
    return series


def _load_series(cfg, out, series_path):
    path = Path(series_path) if series_path else out / "series.csv"
    try:
        return simulator.CoincidenceSeries.from_csv(path, cfg.clock.T)
    except ValueError as exc:
        raise OSError(f"{path}: unreadable series ({exc})") from exc


def cmd_fold(cfg: RunConfig, out: Path, series_path=None):
    folded = analysis.fold(_load_series(cfg, out, series_path))
    folded.to_csv(out / "folded.csv")
    (out / "summary.json").write_text(analysis.summary_json(folded), encoding="utf-8")
    n_av, sigma, dn = analysis.summary(folded)
    print(f"folded {int(folded.n_days[0])} day(s): n_av = {n_av:.4f}, sigma = {sigma:.4f}, delta_n = {dn:.4f}")


def cmd_detect(cfg: RunConfig, out: Path, series_path=None):
    folded = analysis.fold(_load_series(cfg, out, series_path))
    det = analysis.detect(folded, cfg.rate_model(), cfg.polarizers_obj(), cfg.detection.z_threshold)
    analysis.detection_csv(det, out / "detections.csv")
    (out / "detection.json").write_text(analysis.summary_json(folded, det), encoding="utf-8")
    print(f"{len(det.flags)} flagged bin(s) in {len(det.intervals)} interval(s) at z >= {cfg.detection.z_threshold:g}")
    for a, b in det.intervals:
        print(f"  {a:.1f} s -> {b:.1f} s")


def cmd_report(cfg: RunConfig, out: Path):
    cmd_window(cfg, out)
    _write_csv(out / "fig4_phase.csv", ["phi_deg", "qm_rate", "uncorrelated_rate"], fig4_rows(cfg))
    series = cmd_simulate(cfg, out)
    try:
        gof = analysis.poisson_gof(series.counts[0])
    except ValueError as exc:
        raise NumericDegeneracy(str(exc)) from exc
    _write_csv(out / "fig5_histogram.csv", ["count", "frequency", "poisson"],
               zip(gof.values, gof.raw_frequencies, gof.raw_pmf))
    level = optics.uncorrelated_rate(cfg.rate_model()) * cfg.rates.dt
    _write_csv(out / "fig6_one_day.csv", ["sidereal_h", "count", "uncorrelated_level"],
               ((ph / 3600.0, int(c), level) for ph, c in zip(series.phases, series.counts[0])))
    cmd_scan(cfg, out)
    folded = analysis.fold(series)
    folded.to_csv(out / "folded.csv")
    det = analysis.detect(folded, cfg.rate_model(), cfg.polarizers_obj(), cfg.detection.z_threshold)
    analysis.detection_csv(det, out / "detections.csv")
    doc = json.loads(analysis.summary_json(folded, det))
    day_av, day_sigma, day_dn = analysis.summary(series.counts[0])
    bm = bound_map(cfg)
    doc.update(
        day0={"n_av": day_av, "sigma": day_sigma, "delta_n_max": day_dn, "gof_chi2": gof.chi2,
              "gof_dof": gof.dof, "gof_p": gof.p_value},
        bound_grid_min=bm.argmin()[2],
        beta_t_min_beta0=window.beta_t_min(*_bound_params(cfg, None), PreferredFrame(0.0), cfg.clock_obj()),
    )
    (out / "summary.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"report written to {out}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (default: $EBERHARD_CONFIG)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config value, e.g. frame.beta=0.01")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="eberhard", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    b = sub.add_parser("bound", parents=[common], help="tachyon-speed bound and (beta, chi) map")
    b.add_argument("--preset", choices=["salart"], default=None,
                   help="use the long-baseline comparison parameters")
    sub.add_parser("window", parents=[common], help="no-correlation window tables")
    sub.add_parser("scan", parents=[common], help="bound versus chi and versus beta")
    sub.add_parser("simulate", parents=[common], help="simulate a coincidence series")
    for name, blurb in (("fold", "fold a series CSV by sidereal phase"),
                        ("detect", "flag bins above the QM expectation")):
        sp = sub.add_parser(name, parents=[common], help=blurb)
        sp.add_argument("--series", default=None, help="series CSV (default: OUT/series.csv)")
    sub.add_parser("report", parents=[common], help="all figure tables in one run")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config, args.overrides, args.seed)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.cmd == "bound":
            cmd_bound(cfg, out, args.preset)
        elif args.cmd == "window":
            cmd_window(cfg, out)
        elif args.cmd == "scan":
            cmd_scan(cfg, out)
        elif args.cmd == "simulate":
            cmd_simulate(cfg, out)
        elif args.cmd == "fold":
            cmd_fold(cfg, out, args.series)
        elif args.cmd == "detect":
            cmd_detect(cfg, out, args.series)
        elif args.cmd == "report":
            cmd_report(cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericDegeneracy, window.BracketError) as exc:
        print(f"numeric degeneracy: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
