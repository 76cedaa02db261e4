"""Logarithmic energies of step measures and capacity bounds on interval unions."""

import json

from ._logcap import (  # noqa: F401
    ClaimViolation,
    ConfigError,
    DisjointnessViolation,
    Error,
    GeometryError,
    InvalidArgument,
    InvalidCutoff,
    IoError,
    LookupError,
    PolicyError,
    PreconditionError,
    PrecisionError,
    RepresentationError,
    StepMeasure,
    ZeroMassError,
    bound_report,
    capacity_bound_from_series,
    cs_lower_energy_bound,
    energy,
    h_volume,
    level_energy,
    mutual_energy,
    pair_energy,
    phase_classify,
    redistribute,
    self_energy,
    tail_capacity_bound,
    tail_series,
    truncated_energy,
    ursell_schedule,
)
from . import _logcap


def run_convergence(schedule="subexp:0.5", n_grid=(100, 1000, 10000, 100000)):
    """Energies of R(mu | V_n) along n_grid, as a table dict."""
    return json.loads(_logcap._run_convergence(schedule, list(n_grid)))


def run_phase_scan(alpha_grid=(3.0,), m_grid=(1, 10, 100, 1000), terms=100000):
    return json.loads(_logcap._run_phase(list(alpha_grid), list(m_grid), terms))


def run_counterexample(n1=8, depth=2):
    return json.loads(_logcap._run_counterexample(n1, depth))


def column(table, name):
    """Values of one column of a table dict."""
    i = table["columns"].index(name)
    return [row[i] for row in table["rows"]]
