"""Single-episode execution producing one CSV-row record."""

import json
from dataclasses import dataclass
from pathlib import Path

from pushsim.bench.config import EpisodeConfig
from pushsim.bench.executor import EpisodeRunner, Status
from pushsim.bench.metrics import actuation_variation

CSV_FIELDS = ("seed", "task", "planner", "controller", "flow_on", "status",
              "sim_time_sec", "steps", "track_cell_mean_um", "cell_path_um",
              "planned_push_um", "energy_df_sum")


@dataclass(frozen=True)
class EpisodeRecord:
    seed: int
    task: str
    planner: str
    controller: str
    flow_on: bool
    status: str
    sim_time_sec: float
    steps: int
    track_cell_mean_um: float
    cell_path_um: float
    planned_push_um: float
    energy_df_sum: float

    def to_csv_row(self) -> list[str]:
        def fmt(value) -> str:
            return f"{value:.6g}"

        return [str(self.seed), self.task, self.planner, self.controller,
                "true" if self.flow_on else "false", self.status,
                fmt(self.sim_time_sec), str(self.steps),
                fmt(self.track_cell_mean_um), fmt(self.cell_path_um),
                fmt(self.planned_push_um), fmt(self.energy_df_sum)]


@dataclass(frozen=True)
class EpisodeResult:
    record: EpisodeRecord
    final_goal_distance_px: float
    freq_log: tuple[float, ...]
    planner_fallbacks: int
    solver_failures: int

    @property
    def success(self) -> bool:
        return self.record.status == "success"


def run_episode(config: EpisodeConfig, dump_dir: str | None = None) -> EpisodeResult:
    """Run one seeded episode to termination; deterministic in `config`."""
    runner = EpisodeRunner(config)
    if dump_dir is not None:
        runner.frames = []
    runner.run()

    params = config.sim_params
    scale = params.um_per_px
    m = runner.metrics
    track_um = (m.track_sum_px / m.track_samples * scale) if m.track_samples else 0.0
    record = EpisodeRecord(
        seed=config.seed,
        task=config.task.value,
        planner=config.planner.value,
        controller=config.controller.value,
        flow_on=config.flow_on,
        status="success" if runner.status is Status.SUCCESS else "timeout",
        sim_time_sec=runner.world.time,
        steps=runner.world.step_count,
        track_cell_mean_um=track_um,
        cell_path_um=m.cell_path_px * scale,
        planned_push_um=m.planned_length_px * scale,
        energy_df_sum=actuation_variation(runner.freq_log),
    )
    if dump_dir is not None:
        path = Path(dump_dir)
        path.mkdir(parents=True, exist_ok=True)
        name = (f"{record.task}_{'flowon' if record.flow_on else 'flowoff'}_"
                f"{config.planner.name.lower()}_{record.controller.lower()}_"
                f"seed{record.seed}.jsonl")
        with open(path / name, "w", encoding="utf-8") as fh:
            for frame in runner.frames:
                fh.write(json.dumps(frame) + "\n")
    return EpisodeResult(record, runner.final_goal_distance(),
                         tuple(runner.freq_log), runner.planner_fallbacks,
                         runner.solver_failures)
