"""Python bindings for the fbgather simulator."""

from ._core import (
    IoError,
    ParseError,
    Scenario,
    ValidationError,
    advantage_poly,
    expected_informed,
    feasibility,
    mse_advantage,
    oracle_informed,
    power_advantageous,
    power_diff,
    raster_region,
    region_experiment,
    run_sweep,
    run_trial,
)

__all__ = [
    "IoError",
    "ParseError",
    "Scenario",
    "ValidationError",
    "advantage_poly",
    "expected_informed",
    "feasibility",
    "mse_advantage",
    "oracle_informed",
    "power_advantageous",
    "power_diff",
    "raster_region",
    "region_experiment",
    "run_sweep",
    "run_trial",
]
