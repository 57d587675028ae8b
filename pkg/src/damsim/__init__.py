"""Delay alignment modulation simulator for mmWave massive MIMO downlink."""

from .channel import (
    PathParams,
    ScenarioChannel,
    ScenarioConfig,
    UeChannel,
    array_response,
    asymptotic_correlation,
    dbm_to_watts,
    generate_scenario,
    ula_correlation,
    watts_to_dbm,
)
from .core import (
    BeamformerSet,
    DelayGrouping,
    DelaySchedule,
    RateReport,
    analytic_sinr,
    build_grouping,
    compensate_delays,
    sinr_report_forms,
    sum_rate,
    transmit_power,
    zero_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "PathParams",
    "ScenarioChannel",
    "ScenarioConfig",
    "UeChannel",
    "array_response",
    "asymptotic_correlation",
    "dbm_to_watts",
    "generate_scenario",
    "ula_correlation",
    "watts_to_dbm",
    "BeamformerSet",
    "DelayGrouping",
    "DelaySchedule",
    "RateReport",
    "analytic_sinr",
    "build_grouping",
    "compensate_delays",
    "sinr_report_forms",
    "sum_rate",
    "transmit_power",
    "zero_schedule",
    "__version__",
]
