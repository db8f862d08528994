from pushsim.bench.config import (
    BASELINES,
    ControllerKind,
    EpisodeConfig,
    PlannerKind,
    StageParams,
    SuiteConfig,
    TaskKind,
    seed_for,
)
from pushsim.bench.episode import EpisodeRecord, EpisodeResult, run_episode
from pushsim.bench.metrics import (
    actuation_variation,
    tracking_error_um,
    wilson_interval,
)
from pushsim.bench.planner_bench import run_planner_microbench
from pushsim.bench.sensitivity import sensitivity_sweep
from pushsim.bench.suite import run_suite, summarize

__all__ = [
    "BASELINES",
    "ControllerKind",
    "EpisodeConfig",
    "EpisodeRecord",
    "EpisodeResult",
    "PlannerKind",
    "StageParams",
    "SuiteConfig",
    "TaskKind",
    "actuation_variation",
    "run_episode",
    "run_planner_microbench",
    "run_suite",
    "seed_for",
    "sensitivity_sweep",
    "summarize",
    "tracking_error_um",
    "wilson_interval",
]
