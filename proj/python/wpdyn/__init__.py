"""Gaussian wave-packet dynamics under quadratic Hamiltonians."""

import json

from ._wpdyn import (
    CapabilityError,
    ConfigError,
    DivergenceError,
    IoError,
    Packet,
    RangeError,
    ResolutionError,
    System,
    ValidationError,
    builtin_scenarios,
    kernel,
    kernel_residuals,
    moments,
    solve,
    split_step,
    wavefunction,
    wigner,
)
from ._wpdyn import run_scenario_json as _run_scenario_json


def system(law="free", hbar=1.0, mass=1.0, **params):
    """System("constant", omega=1.0) style constructor."""
    return System(json.dumps({"type": law, **params}), hbar, mass)


def run_scenario(config, output_dir=""):
    """Run a built-in name or a config dict; returns the report dict."""
    if isinstance(config, dict):
        config = json.dumps(config)
    return json.loads(_run_scenario_json(config, str(output_dir)))


__all__ = [
    "CapabilityError",
    "ConfigError",
    "DivergenceError",
    "IoError",
    "Packet",
    "RangeError",
    "ResolutionError",
    "System",
    "ValidationError",
    "builtin_scenarios",
    "kernel",
    "kernel_residuals",
    "moments",
    "run_scenario",
    "solve",
    "split_step",
    "system",
    "wavefunction",
    "wigner",
]
