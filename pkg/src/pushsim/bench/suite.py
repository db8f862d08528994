"""Suite orchestration: parallel episode execution, CSV writing, summaries."""

import csv
import logging
import os
import statistics
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path

from pushsim.bench.config import SuiteConfig, TaskKind
from pushsim.bench.episode import CSV_FIELDS, EpisodeResult, run_episode
from pushsim.bench.metrics import wilson_interval
from pushsim.bench.scenario import ScenarioError

log = logging.getLogger(__name__)

_SORT_TASK = {TaskKind.TRANSPORT.value: 0, TaskKind.ASSEMBLY.value: 1}


def _record_key(result: EpisodeResult):
    r = result.record
    return (_SORT_TASK[r.task], r.flow_on, r.planner, r.controller, r.seed)


def _run_one(config, dump_dir):
    try:
        return run_episode(config, dump_dir=dump_dir)
    except ScenarioError as exc:
        return (config, str(exc))


def run_suite(suite: SuiteConfig, out_path: str | Path) -> tuple[list[EpisodeResult], list]:
    """Execute every configured episode and write the CSV atomically.

    Returns (results ordered as written, skipped episodes as (config, reason)).
    """
    configs = suite.episode_configs()
    worker = partial(_run_one, dump_dir=suite.dump_dir)
    if suite.jobs > 1:
        with ProcessPoolExecutor(max_workers=suite.jobs) as pool:
            outcomes = list(pool.map(worker, configs, chunksize=4))
    else:
        outcomes = [worker(cfg) for cfg in configs]

    results = [o for o in outcomes if isinstance(o, EpisodeResult)]
    skipped = [o for o in outcomes if not isinstance(o, EpisodeResult)]
    for config, reason in skipped:
        log.warning("skipped episode seed=%s (%s)", config.seed, reason)
    results.sort(key=_record_key)
    write_csv(results, out_path)
    return results, skipped


def write_csv(results: list[EpisodeResult], out_path: str | Path) -> None:
    """RFC 4180 CSV with the fixed schema header; write-then-rename so a failed
    run never leaves a truncated file."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=out_path.parent, suffix=".csv.tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(CSV_FIELDS)
            for result in results:
                writer.writerow(result.record.to_csv_row())
        os.replace(tmp_name, out_path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


@dataclass(frozen=True)
class GroupSummary:
    task: str
    flow_on: bool
    planner: str
    controller: str
    n: int
    successes: int
    success_rate: float
    wilson_lo: float
    wilson_hi: float
    median_time_s: float | None
    median_track_um: float | None
    median_cell_path_um: float | None
    median_planned_push_um: float | None
    median_energy: float | None


def summarize(results: list[EpisodeResult]) -> list[GroupSummary]:
    """Per-baseline aggregation: success over all runs, medians over successes."""
    groups: dict[tuple, list[EpisodeResult]] = {}
    for result in results:
        r = result.record
        groups.setdefault((r.task, r.flow_on, r.planner, r.controller), []).append(result)

    def med(values):
        values = list(values)
        return statistics.median(values) if values else None

    out = []
    ordering = sorted(groups, key=lambda k: (_SORT_TASK[k[0]], not k[1], k[2], k[3]))
    for key in ordering:
        bucket = groups[key]
        wins = [b for b in bucket if b.success]
        lo, hi = wilson_interval(len(wins), len(bucket))
        out.append(GroupSummary(
            task=key[0], flow_on=key[1], planner=key[2], controller=key[3],
            n=len(bucket), successes=len(wins),
            success_rate=len(wins) / len(bucket),
            wilson_lo=lo, wilson_hi=hi,
            median_time_s=med(b.record.sim_time_sec for b in wins),
            median_track_um=med(b.record.track_cell_mean_um for b in wins),
            median_cell_path_um=med(b.record.cell_path_um for b in wins),
            median_planned_push_um=med(b.record.planned_push_um for b in wins),
            median_energy=med(b.record.energy_df_sum for b in wins),
        ))
    return out


def format_summary(summaries: list[GroupSummary]) -> str:
    def cell(value, digits=3):
        return "--" if value is None else f"{value:.{digits}g}"

    header = (f"{'task':<10}{'flow':<6}{'baseline':<10}{'N':>4}{'success':>9}"
              f"{'wilson95':>16}{'time':>7}{'track':>8}{'cellpath':>10}"
              f"{'planned':>9}{'dOmega':>8}")
    lines = [header]
    for s in summaries:
        lines.append(
            f"{s.task:<10}{'on' if s.flow_on else 'off':<6}"
            f"{s.planner + '+' + s.controller:<10}{s.n:>4}"
            f"{s.success_rate:>9.3f}"
            f"{'[' + f'{s.wilson_lo:.3f}' + ',' + f'{s.wilson_hi:.3f}' + ']':>16}"
            f"{cell(s.median_time_s):>7}{cell(s.median_track_um):>8}"
            f"{cell(s.median_cell_path_um, 4):>10}"
            f"{cell(s.median_planned_push_um, 4):>9}{cell(s.median_energy, 4):>8}")
    return "\n".join(lines)
