"""Shared command limiting, actuation mapping and the closed-loop controller."""

import math
from dataclasses import dataclass

import numpy as np

from pushsim.control.mpc import MpcError, mpc_solve
from pushsim.control.params import ControlParams
from pushsim.control.pid import PidState, pid_update
from pushsim.control.reference import ReferencePhase, ReferenceState, reference_point
from pushsim.engine import ActuationCommand
from pushsim.params import SimParams


def limit_command(u: np.ndarray, u_prev: np.ndarray, speed_limit: float,
                  rate_limit: float) -> np.ndarray:
    """Clip |u| to the speed limit, then |u - u_prev| to the rate limit,
    scaling radially in both cases."""
    u = np.asarray(u, dtype=float)
    u_prev = np.asarray(u_prev, dtype=float)
    speed = float(np.linalg.norm(u))
    if speed > speed_limit:
        u = u * (speed_limit / speed)
    delta = u - u_prev
    jump = float(np.linalg.norm(delta))
    if jump > rate_limit:
        u = u_prev + delta * (rate_limit / jump)
    return u


def to_actuation(u: np.ndarray, prev_heading: float, sim: SimParams,
                 near_zero_speed: float = 1e-6) -> ActuationCommand:
    """Map a planar velocity to (frequency, heading); hold the previous heading
    near zero speed to avoid angle discontinuities."""
    u = np.asarray(u, dtype=float)
    speed = float(np.linalg.norm(u))
    if speed < near_zero_speed:
        heading = prev_heading
    else:
        heading = math.atan2(u[1], u[0])
    freq = speed * sim.um_per_px / sim.speed_per_hz
    freq = min(max(freq, 0.0), sim.max_freq_hz)
    return ActuationCommand(freq, heading)


@dataclass(frozen=True)
class ControllerOutput:
    velocity_command: np.ndarray
    actuation: ActuationCommand
    phase: ReferencePhase
    p_ref: np.ndarray
    error: np.ndarray
    solver_failed: bool = False

    @property
    def diagnostics(self) -> dict:
        return {
            "phase": self.phase.value,
            "p_ref": [float(v) for v in self.p_ref],
            "e": [float(v) for v in self.error],
            "omega": self.actuation.frequency_hz,
            "theta": self.actuation.heading_rad,
            "solver_failed": self.solver_failed,
        }


class PushController:
    """Per-episode closed-loop controller tracking the contact-aware reference
    with either the receding-horizon or the PID velocity law."""

    def __init__(self, law: str, control: ControlParams, sim: SimParams,
                 direction_mode: bool = False):
        if law not in ("mpc", "pid"):
            raise ValueError(f"unknown control law {law!r}")
        self.law = law
        self.control = control
        self.sim = sim
        self.reset(direction_mode=direction_mode)

    def reset(self, direction_mode: bool = False) -> None:
        self.ref_state = ReferenceState(direction_mode=direction_mode)
        self.pid_state = PidState()
        self.u_prev = np.zeros(2)
        self.prev_heading = 0.0

    def control_step(self, robot_pos, cell_pos, waypoint, r_robot: float,
                     r_cell: float) -> ControllerOutput:
        robot_pos = np.asarray(robot_pos, dtype=float)
        cell_pos = np.asarray(cell_pos, dtype=float)
        p_ref, self.ref_state = reference_point(
            robot_pos, cell_pos, np.asarray(waypoint, dtype=float),
            r_robot, r_cell, self.ref_state, self.control)
        error = p_ref - robot_pos

        solver_failed = False
        if self.law == "mpc":
            try:
                u_raw = mpc_solve(robot_pos, p_ref, self.u_prev,
                                  self.control.mpc, self.sim.dt)
            except MpcError:
                u_raw = self.u_prev
                solver_failed = True
        else:
            u_raw, self.pid_state = pid_update(error, self.pid_state,
                                               self.sim.dt, self.control.pid)

        u = limit_command(u_raw, self.u_prev, self.control.speed_limit,
                          self.control.rate_limit)
        cmd = to_actuation(u, self.prev_heading, self.sim,
                           self.control.near_zero_speed)
        self.u_prev = u
        self.prev_heading = cmd.heading_rad
        return ControllerOutput(u, cmd, self.ref_state.phase, p_ref, error,
                                solver_failed)
