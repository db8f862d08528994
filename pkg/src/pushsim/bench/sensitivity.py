"""Success-radius sensitivity: re-threshold recorded final distances, or
re-run episodes at each radius when records are unavailable."""

import statistics
from dataclasses import dataclass, replace

from pushsim.bench.config import SuiteConfig, TaskKind
from pushsim.bench.episode import EpisodeResult, run_episode

_SORT_TASK = {TaskKind.ASSEMBLY.value: 0, TaskKind.TRANSPORT.value: 1}


@dataclass(frozen=True)
class SensitivityRow:
    task: str
    flow_on: bool
    planner: str
    controller: str
    success_base: float
    success_tight: float
    d_success: float
    time_base: float | None
    time_tight: float | None
    d_time: float | None


def _grouped(results: list[EpisodeResult]) -> dict[tuple, list[EpisodeResult]]:
    groups: dict[tuple, list[EpisodeResult]] = {}
    for result in results:
        r = result.record
        groups.setdefault((r.task, r.flow_on, r.planner, r.controller), []).append(result)
    return groups


def _rate_and_time(bucket: list[EpisodeResult], radius: float):
    wins = [b for b in bucket if b.final_goal_distance_px <= radius]
    rate = len(wins) / len(bucket)
    times = [b.record.sim_time_sec for b in wins]
    return rate, (statistics.median(times) if times else None)


def sensitivity_sweep(results: list[EpisodeResult], base_radius: float = 0.5,
                      tight_radius: float = 0.2) -> list[SensitivityRow]:
    """Delta table (tight minus base) per baseline from recorded episodes.

    Success under a radius r is re-derived as final cell-goal distance <= r,
    matching the success-consistency contract, so tightening the radius can
    never raise a success rate.
    """
    rows = []
    groups = _grouped(results)
    ordering = sorted(groups, key=lambda k: (_SORT_TASK[k[0]], not k[1], k[2], k[3]))
    for key in ordering:
        bucket = groups[key]
        rate_b, time_b = _rate_and_time(bucket, base_radius)
        rate_t, time_t = _rate_and_time(bucket, tight_radius)
        rows.append(SensitivityRow(
            task=key[0], flow_on=key[1], planner=key[2], controller=key[3],
            success_base=rate_b, success_tight=rate_t,
            d_success=rate_t - rate_b,
            time_base=time_b, time_tight=time_t,
            d_time=None if time_b is None or time_t is None else time_t - time_b,
        ))
    return rows


def sensitivity_rerun(suite: SuiteConfig, base_radius: float = 0.5,
                      tight_radius: float = 0.2) -> list[SensitivityRow]:
    """Full re-execution at each radius (episodes terminate at their own r)."""
    def rates(radius):
        per_group: dict[tuple, list] = {}
        for config in replace(suite, success_radius=radius).episode_configs():
            result = run_episode(config)
            r = result.record
            per_group.setdefault((r.task, r.flow_on, r.planner, r.controller),
                                 []).append(result)
        return per_group

    base = rates(base_radius)
    tight = rates(tight_radius)
    rows = []
    ordering = sorted(base, key=lambda k: (_SORT_TASK[k[0]], not k[1], k[2], k[3]))
    for key in ordering:

        def stats(groups):
            bucket = groups[key]
            wins = [b for b in bucket if b.success]
            times = [b.record.sim_time_sec for b in wins]
            return (len(wins) / len(bucket),
                    statistics.median(times) if times else None)

        rate_b, time_b = stats(base)
        rate_t, time_t = stats(tight)
        rows.append(SensitivityRow(
            task=key[0], flow_on=key[1], planner=key[2], controller=key[3],
            success_base=rate_b, success_tight=rate_t, d_success=rate_t - rate_b,
            time_base=time_b, time_tight=time_t,
            d_time=None if time_b is None or time_t is None else time_t - time_b,
        ))
    return rows


def format_sensitivity(rows: list[SensitivityRow]) -> str:
    header = (f"{'task':<10}{'flow':<6}{'baseline':<10}"
              f"{'succ@base':>10}{'succ@tight':>11}{'dSucc':>8}"
              f"{'t@base':>8}{'t@tight':>9}{'dT':>7}")
    lines = [header]
    for r in rows:
        t_b = "--" if r.time_base is None else f"{r.time_base:.1f}"
        t_t = "--" if r.time_tight is None else f"{r.time_tight:.1f}"
        d_t = "--" if r.d_time is None else f"{r.d_time:.1f}"
        lines.append(f"{r.task:<10}{'on' if r.flow_on else 'off':<6}"
                     f"{r.planner + '+' + r.controller:<10}"
                     f"{r.success_base:>10.3f}{r.success_tight:>11.3f}"
                     f"{r.d_success:>8.3f}{t_b:>8}{t_t:>9}{d_t:>7}")
    return "\n".join(lines)
