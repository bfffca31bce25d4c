"""Preferred-frame tachyon model of EPR correlations: kinematics, detectable
bounds, coincidence simulation and sidereal-fold analysis."""
from .kinematics import (
    PreferredFrame,
    SiderealClock,
    TachyonSpeed,
    backward_speed,
    c_factor,
    forward_speed,
    theta_of_time,
)
from .optics import PolarizerSettings, RateModel, hybrid_rate, qm_rate, uncorrelated_rate
from .window import (
    BoundMap,
    Geometry,
    PathBudget,
    beta_t_min,
    beta_t_min_oracle,
    no_corr_time_intervals,
    no_correlation,
    rho_window,
    scan_bounds,
)
from .simulator import CoincidenceSeries, SimConfig, simulate
from .analysis import detect, fold, poisson_gof, summary

__version__ = "0.1.0"
