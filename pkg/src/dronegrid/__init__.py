"""Discrete-time simulator and optimizer for a grid of aerial base
stations serving ground users after infrastructure loss, with a powering
drone that tops up depleted units between blocks.

Layers, bottom up: channel (geometry to rates), energy (motion, hover,
batteries), assign_power (user/subchannel binaries plus convexified power
minimization), placement (sectored particle search over positions),
orchestrator (multi-block mission loop), scenario_io (files, traces, CLI).
"""

from .assign_power import (
    Allocation,
    RateConstraintParams,
    RateInfeasibleError,
    ScaState,
    SolverConfig,
    assign_binaries,
    charge_decisions,
    check_backhaul,
    coupling_upper_bound,
    linearization_admits,
    rate_split,
    sca_rate_upper_bound,
    solve_allocation,
    solve_power_given_binaries,
)
from .channel import (
    ChannelParams,
    UserEquipment,
    gain_table,
    interference_table,
    path_gain,
    rate_table,
    sinr,
    sinr_table,
    slant_distance,
    subchannel_rate,
    user_rate,
    user_rates,
)
from .energy import (
    BatteryParams,
    EnergyParams,
    TimeGrid,
    cdbs_battery_step,
    hardware_energy,
    hover_energy,
    hover_power,
    pd_battery_step,
    transmit_energy,
)
from .orchestrator import (
    BlockResult,
    DepletionError,
    PdDepletedError,
    Scenario,
    SimulationError,
    audit_run,
    kinematics_check,
    run_simulation,
)
from .placement import (
    AreaBounds,
    SearchConfig,
    evaluate_particle,
    generate_particles,
    search_positions,
    sector_partition,
    shrink_and_realign,
)
from .scenario_io import (
    ScenarioError,
    cli_main,
    draw_users,
    emit_traces,
    load_scenario,
    serialize_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "AreaBounds",
    "BatteryParams",
    "BlockResult",
    "ChannelParams",
    "DepletionError",
    "EnergyParams",
    "PdDepletedError",
    "RateConstraintParams",
    "RateInfeasibleError",
    "ScaState",
    "Scenario",
    "ScenarioError",
    "SearchConfig",
    "SimulationError",
    "SolverConfig",
    "TimeGrid",
    "UserEquipment",
    "assign_binaries",
    "audit_run",
    "cdbs_battery_step",
    "charge_decisions",
    "check_backhaul",
    "cli_main",
    "coupling_upper_bound",
    "draw_users",
    "emit_traces",
    "evaluate_particle",
    "gain_table",
    "generate_particles",
    "hardware_energy",
    "hover_energy",
    "hover_power",
    "interference_table",
    "kinematics_check",
    "linearization_admits",
    "load_scenario",
    "path_gain",
    "pd_battery_step",
    "rate_split",
    "rate_table",
    "run_simulation",
    "sca_rate_upper_bound",
    "search_positions",
    "sector_partition",
    "serialize_scenario",
    "shrink_and_realign",
    "sinr",
    "sinr_table",
    "slant_distance",
    "solve_allocation",
    "solve_power_given_binaries",
    "subchannel_rate",
    "transmit_energy",
    "user_rate",
    "user_rates",
]
