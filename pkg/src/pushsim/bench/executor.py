"""Incremental two-stage episode execution.

Every episode alternates an approach stage (shared waypoint-following policy:
heading at the current waypoint, frequency proportional to the distance) and a
push stage (the evaluated controller tracking the push polyline through the
contact-aware reference). The runner advances the world one step per call so
the headless bench and the interactive session drive episodes identically.

Assembly pushes detour through a staging point slightly inside the hexagon so
the final leg runs radially outward; the robot trailing the pushed cell then
stays clear of already-placed neighbors, and subgoals are driven a little
deeper than the success radius so departing contact cannot unseat them.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from pushsim.assembly import plan_assembly
from pushsim.bench.config import EpisodeConfig, TaskKind
from pushsim.bench.scenario import Scenario, generate_scenario
from pushsim.control import PushController
from pushsim.engine import ActuationCommand, step
from pushsim.planning import PlannerFailure, PlanRequest, plan_path
from pushsim.planning.polyline import path_length, point_polyline_distance, resample


class Stage(enum.Enum):
    APPROACH = "approach"
    PUSH = "push"


class Status(enum.Enum):
    RUNNING = "running"
    SUCCESS = "success"
    TIMEOUT = "timeout"


@dataclass
class StepInfo:
    command: ActuationCommand
    stage: str
    phase: str | None
    subgoal: tuple[int, tuple[float, float]]
    planner_fallbacks: int
    solver_failures: int


@dataclass
class PushMetrics:
    planned_length_px: float = 0.0
    cell_points: list = field(default_factory=list)
    cell_path_px: float = 0.0
    track_sum_px: float = 0.0
    track_samples: int = 0


class EpisodeRunner:
    def __init__(self, config: EpisodeConfig, scenario: Scenario | None = None):
        self.config = config
        self.scenario = scenario or generate_scenario(config)
        self.world = self.scenario.world
        self.control_params = config.control_params
        self.stage_params = config.stage
        self.status = Status.RUNNING
        self.stage = Stage.APPROACH
        self.freq_log: list[float] = []
        self.metrics = PushMetrics()
        self.planner_fallbacks = 0
        self.solver_failures = 0
        self.frames: list[dict] | None = None
        self._controller: PushController | None = None
        self._approach_polyline = None
        self._approach_idx = 0
        self._push_polyline = None
        self._push_idx = 0
        self._replan_streak = 0
        self._plan_retry_wait = 0
        self._stall_steps = 0
        self._subgoal: tuple[int, np.ndarray] | None = None
        self._next_subgoal()

    # -- planning helpers ---------------------------------------------------

    def _plan(self, request: PlanRequest):
        order = [self.config.planner.key]
        order.append("astar" if order[0] == "agp" else "agp")
        for fallback, planner in enumerate(order):
            try:
                path = plan_path(self.world, request, planner=planner,
                                 spacing=self.stage_params.spacing)
                if fallback:
                    self.planner_fallbacks += 1
                return path
            except PlannerFailure:
                continue
        return None

    def _retreat_waypoint(self) -> np.ndarray | None:
        """Pure-separation first move when the robot starts in contact, so
        departing for the next subgoal cannot shove what it just placed."""
        robot = self.world.positions[0]
        gaps = (np.linalg.norm(self.world.positions[1:] - robot, axis=1)
                - self.world.radii[1:] - self.world.radii[0])
        nearest = int(np.argmin(gaps))
        if gaps[nearest] > 1.0:
            return None
        away = robot - self.world.positions[1 + nearest]
        norm = float(np.linalg.norm(away))
        if norm < 1e-9:
            return None
        point = robot + 3.0 * away / norm
        params = self.config.sim_params
        r = self.world.radii[0]
        return np.clip(point, [r, r], [params.width - r, params.height - r])

    def _plan_approach(self) -> None:
        """Route the robot to the pre-contact point behind the cell, oriented
        along the first push direction; when that side is unreachable (e.g. the
        point falls between clustered cells), try rotated contact sides."""
        cell_id, _ = self._subgoal
        cell = self.world.positions[cell_id]
        base = self._initial_push_direction()
        standoff = (self.world.radii[0] + self.world.radii[cell_id]
                    + self.control_params.pre_contact_clearance)
        robot = self.world.positions[0]
        retreat = self._retreat_waypoint()
        start = robot if retreat is None else retreat
        polyline = None
        offsets = [0.0]
        for j in range(1, 7):
            offsets += [j * math.pi / 6.0, -j * math.pi / 6.0]
        plan_radius = float(self.world.radii[0]) + self.stage_params.approach_margin
        for ang in offsets:
            c, s = math.cos(ang), math.sin(ang)
            t = np.array([base[0] * c - base[1] * s, base[0] * s + base[1] * c])
            target = cell - standoff * t
            if np.linalg.norm(target - start) < 1e-9:
                polyline = np.asarray([start, target])
                break
            polyline = self._plan(PlanRequest(start, target, plan_radius,
                                              excluded_ids={0}))
            if polyline is not None:
                break
        if polyline is not None and retreat is not None:
            polyline = np.vstack([robot[None, :], polyline])
        self._approach_polyline = polyline
        self._approach_idx = 0
        self._plan_retry_wait = 0
        self._stall_steps = 0

    def _initial_push_direction(self) -> np.ndarray:
        cell_id, goal = self._subgoal
        cell = self.world.positions[cell_id]
        if self._push_polyline is not None and len(self._push_polyline) >= 2:
            # aim at the first waypoint meaningfully away from the cell
            for vertex in self._push_polyline[1:]:
                delta = vertex - cell
                norm = float(np.linalg.norm(delta))
                if norm > 1.0:
                    return delta / norm
        delta = goal - cell
        norm = float(np.linalg.norm(delta))
        return delta / norm if norm > 1e-9 else np.array([1.0, 0.0])

    def _staging_point(self, cell: np.ndarray, goal: np.ndarray) -> np.ndarray | None:
        spec = self.scenario.hex_spec
        if spec is None:
            return None
        outward = goal - spec.center
        norm = float(np.linalg.norm(outward))
        if norm < 1e-9:
            return None
        outward = outward / norm
        # stage on the cell's own side of the vertex so the chain never reverses
        side = 1.0 if float((cell - goal) @ outward) >= 0.0 else -1.0
        leg = self.stage_params.staging_leg * self.world.radii[1]
        return goal + side * leg * outward

    def _plan_push(self, initial: bool) -> None:
        cell_id, goal = self._subgoal
        cell = self.world.positions[cell_id]
        r_move = float(self.world.radii[cell_id])
        excluded = {0, cell_id}
        polyline = None
        staging = self._staging_point(cell, goal)
        leg = self.stage_params.staging_leg * self.world.radii[1]
        if staging is not None and np.linalg.norm(goal - cell) > 1.5 * leg:
            head = self._plan(PlanRequest(cell, staging, r_move, excluded_ids=excluded))
            if head is not None:
                polyline = resample(np.vstack([head, goal[None, :]]),
                                    self.stage_params.spacing)
        if polyline is None and np.linalg.norm(goal - cell) < 1e-9:
            polyline = np.asarray([cell, goal])
        if polyline is None:
            polyline = self._plan(PlanRequest(cell, goal, r_move, excluded_ids=excluded))
        self._push_polyline = polyline
        self._push_idx = 0
        self._replan_streak = 0
        self._plan_retry_wait = 0
        self._stall_steps = 0
        if initial and polyline is not None:
            self.metrics.planned_length_px += path_length(polyline)

    # -- subgoal sequencing -------------------------------------------------

    def _remaining_subgoals(self) -> list[tuple[int, np.ndarray]]:
        if self.config.task is TaskKind.TRANSPORT:
            cell_id = self.scenario.selected_cell
            goal = self.scenario.goal
            done = np.linalg.norm(self.world.positions[cell_id] - goal) \
                <= self.config.success_radius
            return [] if done else [(cell_id, goal)]
        cells = {i: self.world.positions[i].copy()
                 for i in range(1, self.world.n_bodies)}
        plan = plan_assembly(cells, self.scenario.hex_spec, self.world.positions[0],
                             self.config.success_radius)
        return [(s.cell_id, s.goal) for s in plan]

    def _next_subgoal(self) -> None:
        remaining = self._remaining_subgoals()
        if not remaining:
            self.status = Status.SUCCESS
            self._subgoal = None
            return
        self._subgoal = remaining[0]
        self.stage = Stage.APPROACH
        self._controller = PushController(self.config.controller.key,
                                          self.control_params,
                                          self.config.sim_params)
        if self.config.task is TaskKind.ASSEMBLY:
            # cells are static during the approach (no flow), so the push
            # chain is planned up front and orients the pre-contact point
            self._plan_push(initial=True)
        else:
            self._push_polyline = None
        self._plan_approach()

    def _placement_radius(self) -> float:
        if self.config.task is TaskKind.ASSEMBLY:
            return self.config.success_radius * self.stage_params.place_fraction
        return self.config.success_radius

    def _subgoal_reached(self) -> bool:
        cell_id, goal = self._subgoal
        return float(np.linalg.norm(self.world.positions[cell_id] - goal)) \
            <= self._placement_radius()

    # -- stepping -----------------------------------------------------------

    def step_once(self) -> StepInfo | None:
        """Advance one simulator step; None once the episode has terminated."""
        if self.status is not Status.RUNNING:
            return None
        while self._subgoal is not None and self._subgoal_reached():
            self._next_subgoal()
            if self.status is not Status.RUNNING:
                return None
        if self.world.step_count >= self.config.max_steps:
            self.status = Status.TIMEOUT
            return None

        if self.stage is Stage.APPROACH:
            cmd, phase = self._approach_command()
            if self.stage is Stage.PUSH:  # switched on arrival this call
                cmd, phase = self._push_command()
        else:
            cmd, phase = self._push_command()

        cell_id, goal = self._subgoal
        prev_cell = self.world.positions[cell_id].copy()
        prev_robot = self.world.positions[0].copy()
        step(self.world, cmd)
        self.freq_log.append(cmd.frequency_hz)

        if self.stage is Stage.PUSH:
            cell = self.world.positions[cell_id]
            moved = float(np.linalg.norm(cell - prev_cell))
            self.metrics.cell_path_px += moved
            self.metrics.cell_points.append(cell.copy())
            if self._push_polyline is not None:
                err = point_polyline_distance(cell, self._push_polyline)
                self.metrics.track_sum_px += err
                self.metrics.track_samples += 1
                if err > self.stage_params.replan_error:
                    self._replan_streak += 1
                    if self._replan_streak >= self.stage_params.replan_patience:
                        self._plan_push(initial=False)
                else:
                    self._replan_streak = 0
            # a jammed push (robot driving, cell wedged) gets a fresh plan
            if cmd.frequency_hz > 1.0 and moved < 0.02:
                self._stall_steps += 1
                if self._stall_steps >= 2 * self.stage_params.replan_patience:
                    self._plan_push(initial=False)
            else:
                self._stall_steps = 0
        else:
            robot_moved = float(np.linalg.norm(self.world.positions[0] - prev_robot))
            if cmd.frequency_hz > 1.0 and robot_moved < 0.05:
                self._stall_steps += 1
                if self._stall_steps >= self.stage_params.replan_patience:
                    self._plan_approach()
            else:
                self._stall_steps = 0

        if self.frames is not None:
            self.frames.append(self._frame(cmd, phase))
        return StepInfo(cmd, self.stage.value, phase,
                        (cell_id, (float(goal[0]), float(goal[1]))),
                        self.planner_fallbacks, self.solver_failures)

    def _approach_command(self) -> tuple[ActuationCommand, str | None]:
        sim = self.config.sim_params
        if self._approach_polyline is None:
            if self._plan_retry_wait <= 0:
                self._plan_approach()
                if self._approach_polyline is None:
                    self._plan_retry_wait = self.stage_params.plan_retry_interval
            else:
                self._plan_retry_wait -= 1
            if self._approach_polyline is None:
                return ActuationCommand(0.0, 0.0), None
        robot = self.world.positions[0]
        polyline = self._approach_polyline
        last = len(polyline) - 1
        while (self._approach_idx < last
               and np.linalg.norm(polyline[self._approach_idx] - robot)
               <= self.stage_params.waypoint_tolerance):
            self._approach_idx += 1
        waypoint = polyline[self._approach_idx]
        dist = float(np.linalg.norm(waypoint - robot))
        if self._approach_idx == last and dist <= self.stage_params.waypoint_tolerance:
            self.stage = Stage.PUSH
            if self._push_polyline is None:
                self._plan_push(initial=True)
            return ActuationCommand(0.0, 0.0), None
        freq = min(max(self.stage_params.approach_gain * dist, 0.0), sim.max_freq_hz)
        cell_id = self._subgoal[0]
        others = [i for i in range(1, self.world.n_bodies) if i != cell_id]
        if others:
            gaps = (np.linalg.norm(self.world.positions[others] - robot, axis=1)
                    - self.world.radii[others] - self.world.radii[0])
            if float(gaps.min()) < 1.0:  # disengage bystanders gently
                freq = min(freq, 6.0)
        heading = math.atan2(waypoint[1] - robot[1], waypoint[0] - robot[0])
        return ActuationCommand(freq, heading), None

    def _push_command(self) -> tuple[ActuationCommand, str | None]:
        sim = self.config.sim_params
        cell_id, goal = self._subgoal
        cell = self.world.positions[cell_id]
        if self._push_polyline is None:
            if self._plan_retry_wait <= 0:
                self._plan_push(initial=self.metrics.planned_length_px == 0.0)
                if self._push_polyline is None:
                    self._plan_retry_wait = self.stage_params.plan_retry_interval
            else:
                self._plan_retry_wait -= 1
            if self._push_polyline is None:
                return ActuationCommand(0.0, 0.0), None
        polyline = self._push_polyline
        last = len(polyline) - 1
        # advance on arrival or when the next waypoint is already nearer; a
        # bypassed waypoint must never become a backward attractor
        while self._push_idx < last:
            d_here = np.linalg.norm(polyline[self._push_idx] - cell)
            if d_here <= self.stage_params.waypoint_tolerance:
                self._push_idx += 1
            elif np.linalg.norm(polyline[self._push_idx + 1] - cell) < d_here:
                self._push_idx += 1
            else:
                break
        waypoint = polyline[self._push_idx]
        if np.linalg.norm(waypoint - cell) < 1e-9:
            waypoint = goal
        out = self._controller.control_step(self.world.positions[0], cell, waypoint,
                                            float(self.world.radii[0]),
                                            float(self.world.radii[cell_id]))
        if out.solver_failed:
            self.solver_failures += 1
        freq = out.actuation.frequency_hz
        d_goal = float(np.linalg.norm(cell - goal))
        brake = self.stage_params.brake_gain * d_goal
        if d_goal > self.config.success_radius:
            freq = max(freq, self.stage_params.freq_floor)
            freq = min(freq, max(brake, self.stage_params.freq_floor))
        else:
            freq = min(freq, brake)
        freq = min(freq, sim.max_freq_hz)
        return ActuationCommand(freq, out.actuation.heading_rad), out.phase.value

    def _frame(self, cmd: ActuationCommand, phase: str | None) -> dict:
        return {
            "t": self.world.time,
            "robot": [float(v) for v in self.world.positions[0]],
            "cells": [[float(v) for v in p] for p in self.world.positions[1:]],
            "omega": cmd.frequency_hz,
            "theta": cmd.heading_rad,
            "phase": phase if phase is not None else self.stage.value,
        }

    def final_goal_distance(self) -> float:
        """Transport: pushed-cell distance to the goal. Assembly: worst vertex's
        distance to its nearest cell (<= r_succ for all iff fully assembled)."""
        if self.config.task is TaskKind.TRANSPORT:
            return float(np.linalg.norm(
                self.world.positions[self.scenario.selected_cell] - self.scenario.goal))
        cells = self.world.positions[1:]
        return float(max(np.linalg.norm(cells - v, axis=1).min()
                         for v in self.scenario.vertices))

    def run(self) -> None:
        while self.step_once() is not None:
            pass
