"""Radio-stripe uplink positioning: simulation, ML estimation and bounds."""

from rsloc._core import (
    ConfigError,
    NumericalError,
    OfdmConfig,
    ScenarioConfig,
    StripePose,
    UeState,
    average_sdnr,
    bounds,
    default_scenario,
    estimate,
    load_config,
    monte_carlo,
    noise_power,
    solve_power_for_sdnr,
    synthesize,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "OfdmConfig",
    "ScenarioConfig",
    "StripePose",
    "UeState",
    "average_sdnr",
    "bounds",
    "default_scenario",
    "estimate",
    "load_config",
    "monte_carlo",
    "noise_power",
    "solve_power_for_sdnr",
    "synthesize",
]
