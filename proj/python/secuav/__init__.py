"""Secrecy-rate maximizing UAV placement and trajectory planning."""

from ._secuav import (
    Error,
    InfeasibleError,
    IoError,
    ParseError,
    Scenario,
    SolverError,
    ValidationError,
    altitude_opt,
    default_scenario,
    kkt_power,
    load_scenario,
    parse_scenario,
    plan,
    secrecy_rate,
    solve_static,
)

SCHEMES = ("full3d", "2d", "fhf-adaptive", "fhf-constant")
MODES = ("noncolluding", "colluding")

__all__ = [
    "Error",
    "InfeasibleError",
    "IoError",
    "MODES",
    "ParseError",
    "SCHEMES",
    "Scenario",
    "SolverError",
    "ValidationError",
    "altitude_opt",
    "default_scenario",
    "kkt_power",
    "load_scenario",
    "parse_scenario",
    "plan",
    "secrecy_rate",
    "solve_static",
]
