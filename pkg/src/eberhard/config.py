"""Run configuration: JSON file + dotted-key overrides over built-in defaults.

Angles are given in degrees here and converted to radians when the
library objects are built.
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from .kinematics import SIDEREAL_DAY, PreferredFrame, SiderealClock, TachyonSpeed
from .optics import FIT_A, FIT_B, N_DARK, PolarizerSettings, RateModel
from .simulator import SimConfig
from .window import Geometry

CONFIG_ENV = "EBERHARD_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass
class GeometryCfg:
    d_ab: float = 1.75
    delta: float = 0.0
    delta_err: float = 280e-6


@dataclass
class FrameCfg:
    beta: float = 1.2e-3
    chi_deg: float = 90.0
    phi0_deg: float = 0.0


@dataclass
class TachyonCfg:
    beta_t: float = 1e3


@dataclass
class RatesCfg:
    a: float = FIT_A
    b: float = FIT_B
    n_dark: float = N_DARK
    dt: float = 4.0


@dataclass
class PolarizersCfg:
    gamma1_deg: float = 45.0
    gamma2_deg: float = 45.0
    phi_state_deg: float = 180.0


@dataclass
class ClockCfg:
    T: float = SIDEREAL_DAY


@dataclass
class SimulationCfg:
    mode: str = "qm"  # "qm" or "eberhard"
    n_days: int = 21
    eta: float = 0.0
    seed: int = 0
    workers: int = 1


@dataclass
class DetectionCfg:
    z_threshold: float = 5.0


@dataclass
class ScanCfg:
    beta_min: float = 0.0
    beta_max: float = 0.1
    n_beta: int = 50
    chi_min_deg: float = 0.0
    chi_max_deg: float = 180.0
    n_chi: int = 50
    fig7_betas: list = field(default_factory=lambda: [1e-3, 1e-2, 0.1, 0.3, 0.5])
    fig8_beta_min: float = 1e-5
    fig8_beta_max: float = 0.99
    fig8_n: int = 200


@dataclass
class WindowCfg:
    n_theta: int = 721


@dataclass
class SalartCfg:
    rho_bar: float = 5.4e-6
    dt: float = 360.0


@dataclass
class RunConfig:
    geometry: GeometryCfg = field(default_factory=GeometryCfg)
    frame: FrameCfg = field(default_factory=FrameCfg)
    tachyon: TachyonCfg = field(default_factory=TachyonCfg)
    rates: RatesCfg = field(default_factory=RatesCfg)
    polarizers: PolarizersCfg = field(default_factory=PolarizersCfg)
    clock: ClockCfg = field(default_factory=ClockCfg)
    simulation: SimulationCfg = field(default_factory=SimulationCfg)
    detection: DetectionCfg = field(default_factory=DetectionCfg)
    scan: ScanCfg = field(default_factory=ScanCfg)
    window: WindowCfg = field(default_factory=WindowCfg)
    salart: SalartCfg = field(default_factory=SalartCfg)

    # library objects

    def geometry_obj(self) -> Geometry:
        g = self.geometry
        return Geometry(g.d_ab, g.delta, g.delta_err)

    def frame_obj(self) -> PreferredFrame:
        f = self.frame
        return PreferredFrame(f.beta, math.radians(f.chi_deg), math.radians(f.phi0_deg))

    def tachyon_obj(self) -> TachyonSpeed:
        return TachyonSpeed(self.tachyon.beta_t)

    def rate_model(self) -> RateModel:
        r = self.rates
        return RateModel(r.a, r.b, r.n_dark, r.dt)

    def polarizers_obj(self) -> PolarizerSettings:
        p = self.polarizers
        return PolarizerSettings(math.radians(p.gamma1_deg), math.radians(p.gamma2_deg), math.radians(p.phi_state_deg))

    def clock_obj(self) -> SiderealClock:
        return SiderealClock(self.clock.T)

    def sim_config(self) -> SimConfig:
        s = self.simulation
        eb = s.mode == "eberhard"
        return SimConfig(
            geometry=self.geometry_obj(),
            pf=self.frame_obj() if eb else None,
            ts=self.tachyon_obj() if eb else None,
            rm=self.rate_model(),
            pol=self.polarizers_obj(),
            clock=self.clock_obj(),
            n_days=s.n_days,
            eta=s.eta,
            seed=s.seed,
        )

    def validate(self) -> "RunConfig":
        if self.simulation.mode not in ("qm", "eberhard"):
            raise ConfigError(f"simulation.mode must be 'qm' or 'eberhard', got {self.simulation.mode!r}")
        for name in ("n_beta", "n_chi", "fig8_n"):
            if getattr(self.scan, name) < 1:
                raise ConfigError(f"scan.{name} must be at least 1")
        if self.window.n_theta < 2:
            raise ConfigError("window.n_theta must be at least 2")
        if self.simulation.workers < 1:
            raise ConfigError("simulation.workers must be at least 1")
        try:
            self.geometry_obj()
            self.frame_obj()
            self.tachyon_obj()
            self.rate_model()
            self.polarizers_obj()
            self.sim_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(value, default, key):
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
    elif isinstance(default, float):
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif isinstance(default, str):
        if isinstance(value, str):
            return value
    elif isinstance(default, list):
        if isinstance(value, list) and all(isinstance(v, (int, float)) for v in value):
            return [float(v) for v in value]
    raise ConfigError(f"{key}: expected {type(default).__name__}, got {value!r}")


def _apply(cfg: RunConfig, data: dict, origin: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{origin}: top level must be an object")
    for section, values in data.items():
        if section not in cfg.__dataclass_fields__:
            raise ConfigError(f"{origin}: unknown section {section!r}")
        if not isinstance(values, dict):
            raise ConfigError(f"{origin}: section {section!r} must be an object")
        sub = getattr(cfg, section)
        for key, value in values.items():
            if key not in sub.__dataclass_fields__:
                raise ConfigError(f"{origin}: unknown key {section}.{key}")
            setattr(sub, key, _coerce(value, getattr(sub, key), f"{section}.{key}"))


def parse_override(text: str):
    """'section.key=value' -> ('section', 'key', parsed value)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not key=value")
    path, raw = text.split("=", 1)
    parts = path.strip().split(".")
    if len(parts) != 2:
        raise ConfigError(f"override key {path!r} must be section.key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return parts[0], parts[1], value


def load_config(path=None, overrides=(), seed=None) -> RunConfig:
    """Defaults, then the JSON file (explicit path or $EBERHARD_CONFIG), then overrides."""
    cfg = RunConfig()
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is not None:
        text = Path(path).read_text(encoding="utf-8")  # OSError propagates as I/O failure
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        _apply(cfg, data, str(path))
    for ov in overrides:
        section, key, value = parse_override(ov)
        _apply(cfg, {section: {key: value}}, "--set")
    if seed is not None:
        cfg.simulation.seed = int(seed)
    return cfg.validate()
