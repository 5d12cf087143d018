"""Weather-driven Jacobi-diffusion PV forecasting."""

import json

from ._pvsde import (
    Error,
    SdeParams,
    identify_hour,
    kl_divergence,
    make_fan,
    nd,
    nrmse,
    picp,
    rho_risk,
    simulate_hour,
    solar_elevation,
    stationary_density,
    stationary_shape,
    trimmed_mean,
)
from ._pvsde import run_command as _run_command

__all__ = [
    "Error",
    "SdeParams",
    "identify_hour",
    "kl_divergence",
    "make_fan",
    "nd",
    "nrmse",
    "picp",
    "rho_risk",
    "run",
    "simulate_hour",
    "solar_elevation",
    "stationary_density",
    "stationary_shape",
    "trimmed_mean",
]


def run(command, out_dir, config=None, base_dir=""):
    """Run a pipeline command with a dict (or text) config; returns the report dict."""
    if config is None:
        text = ""
    elif isinstance(config, str):
        text = config
    else:
        text = "".join(f"{k} = {v}\n" for k, v in config.items())
    return json.loads(_run_command(command, text, str(out_dir), str(base_dir)))
