"""Joint user association and UAV placement for two-tier UAV-assisted VLC networks."""
from .association import run_association
from .experiment import ExperimentSpec, generate_scenario, run_experiment
from .geometry import Disk, brute_force_sed, smallest_enclosing_disk
from .model import (
    Association, NetworkParams, Placement, Scenario, channel_gain, covers, illuminance,
    lambertian_order, link_rate, objective, optical_gain, sum_rate,
)
from .planner import (
    PlannerConfig, PlanResult, baseline_fixed_placement, check_constraints, evaluate,
    exhaustive_solve, optimize_placement, plan,
)

__version__ = "0.1.0"

__all__ = [
    "Association", "Disk", "ExperimentSpec", "NetworkParams", "Placement", "PlanResult",
    "PlannerConfig", "Scenario", "baseline_fixed_placement", "brute_force_sed", "channel_gain",
    "check_constraints", "covers", "evaluate", "exhaustive_solve", "generate_scenario",
    "illuminance", "lambertian_order", "link_rate", "objective", "optical_gain",
    "optimize_placement", "plan", "run_association", "run_experiment", "smallest_enclosing_disk",
    "sum_rate",
]
