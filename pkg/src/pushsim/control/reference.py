"""Contact-aware tracking reference.

Before contact the controller aims at a point behind the selected cell on the
line from the cell to its waypoint; once contact is detected with the robot
heading roughly aligned to the push direction, the reference slides over a
short transition to a closer point that keeps pushing while limiting
compression. In direction-control mode an abrupt flip of the desired push
direction reverts to the pre-contact point for a few steps (hysteresis).
"""

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from pushsim.control.params import ControlParams
from pushsim.engine import normalize_angle


class ReferencePhase(enum.Enum):
    APPROACH = "approach"
    TRANSITION = "transition"
    PUSH = "push"


@dataclass(frozen=True)
class ReferenceState:
    phase: ReferencePhase = ReferencePhase.APPROACH
    transition_progress: float = 0.0
    last_push_dir: tuple[float, float] | None = None
    direction_mode: bool = False
    revert_remaining: int = 0


def reference_point(robot: np.ndarray, cell: np.ndarray, goal: np.ndarray,
                    r_robot: float, r_cell: float, state: ReferenceState,
                    params: ControlParams) -> tuple[np.ndarray, ReferenceState]:
    """Tracking reference for the current step and the advanced state."""
    to_goal = np.asarray(goal, dtype=float) - np.asarray(cell, dtype=float)
    dist = float(np.linalg.norm(to_goal))
    if dist == 0.0:
        raise ValueError("push direction undefined: waypoint coincides with the cell")
    t = to_goal / dist
    p_pre = cell - (r_robot + r_cell + params.pre_contact_clearance) * t
    p_push = cell - (r_robot + params.keep_factor * r_cell) * t
    contact = float(np.linalg.norm(cell - robot)) <= r_robot + r_cell + params.contact_tolerance

    phase = state.phase
    progress = state.transition_progress
    revert = state.revert_remaining

    if state.direction_mode and state.last_push_dir is not None:
        if float(t @ np.asarray(state.last_push_dir)) < 0.0:  # flip beyond a quarter turn
            phase = ReferencePhase.APPROACH
            progress = 0.0
            revert = params.revert_steps

    if revert > 0:
        revert -= 1
        p_ref = p_pre
        phase = ReferencePhase.APPROACH
        progress = 0.0
    elif phase is ReferencePhase.APPROACH:
        # alignment = the robot sits behind the cell relative to the push
        # direction; a commanded-heading test would chatter at near-zero speed
        to_cell = np.asarray(cell, dtype=float) - np.asarray(robot, dtype=float)
        bearing = math.atan2(to_cell[1], to_cell[0])
        aligned = abs(normalize_angle(bearing - math.atan2(t[1], t[0]))) \
            <= params.alignment_threshold
        if contact and aligned:
            phase = ReferencePhase.TRANSITION
            progress = 1.0 / params.transition_steps
            if progress >= 1.0:
                phase = ReferencePhase.PUSH
                p_ref = p_push
            else:
                p_ref = p_pre + progress * (p_push - p_pre)
        else:
            p_ref = p_pre
    elif phase is ReferencePhase.TRANSITION:
        progress = min(1.0, progress + 1.0 / params.transition_steps)
        if progress >= 1.0:
            phase = ReferencePhase.PUSH
            p_ref = p_push
        else:
            p_ref = p_pre + progress * (p_push - p_pre)
    else:
        p_ref = p_push

    new_state = replace(state, phase=phase, transition_progress=progress,
                        last_push_dir=(float(t[0]), float(t[1])),
                        revert_remaining=revert)
    return p_ref, new_state
