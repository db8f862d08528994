"""World state, scene generation and observations.

Bodies are rigid disks stored in flat numpy arrays (index 0 is always the
robot) so the stepping pipeline can vectorize pair interactions. `Body` is a
lightweight per-index view used at API boundaries.
"""

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from pushsim.params import SimParams
from pushsim.rng import STREAM_CONTACT, STREAM_NOISE, STREAM_SCENE, make_stream


class BodyKind(enum.Enum):
    ROBOT = "robot"
    CELL = "cell"


@dataclass(frozen=True)
class Body:
    id: int
    kind: BodyKind
    position: np.ndarray    # (2,) [px]
    velocity: np.ndarray    # (2,) [px/s]
    radius: float           # [px]
    drag_inverse: float     # [px/s per force unit]


class SceneError(RuntimeError):
    """No feasible body placement within the attempt budget."""


@dataclass(frozen=True)
class SceneConfig:
    n_cells: int = 20
    robot_radius_um: float = 5.0
    cell_radius_um: float = 5.0
    min_clearance: float = 1.0          # required initial gap between disks [px] (repo default)
    robot_box: tuple[float, float, float, float] | None = None  # (x0, y0, x1, y1) sampling region
    max_attempts: int = 2000

    def robot_radius_px(self, params: SimParams) -> float:
        return self.robot_radius_um / params.um_per_px

    def cell_radius_px(self, params: SimParams) -> float:
        return self.cell_radius_um / params.um_per_px


class WorldState:
    """Mutable simulation state. Single-threaded per instance; distinct
    worlds are independent and safe to run in parallel."""

    def __init__(self, positions, radii, drag_inverse, params: SimParams, seed: int):
        self.positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
        self.velocities = np.zeros_like(self.positions)
        self.radii = np.asarray(radii, dtype=np.float64).reshape(-1)
        self.drag_inverse = np.asarray(drag_inverse, dtype=np.float64).reshape(-1)
        if not (len(self.positions) == len(self.radii) == len(self.drag_inverse)):
            raise ValueError("positions, radii and drag_inverse must agree in length")
        if np.any(self.radii <= 0) or np.any(self.drag_inverse <= 0):
            raise ValueError("radii and drag_inverse must be > 0")
        if not np.all(np.isfinite(self.positions)):
            raise ValueError("positions must be finite")
        self.params = params
        self.seed = int(seed)
        self.time = 0.0
        self.step_count = 0
        self.noise_rng = make_stream(seed, STREAM_NOISE)
        self.contact_rng = make_stream(seed, STREAM_CONTACT)
        self.degenerate_contacts = 0    # warning counter; coincident centers seen
        # pair index cache (i < j)
        n = len(self.radii)
        self._pair_i, self._pair_j = np.triu_indices(n, k=1)

    @property
    def n_bodies(self) -> int:
        return len(self.radii)

    def body(self, index: int) -> Body:
        kind = BodyKind.ROBOT if index == 0 else BodyKind.CELL
        return Body(index, kind, self.positions[index].copy(),
                    self.velocities[index].copy(), float(self.radii[index]),
                    float(self.drag_inverse[index]))

    @property
    def robot(self) -> Body:
        return self.body(0)

    def cells(self) -> list[Body]:
        return [self.body(i) for i in range(1, self.n_bodies)]

    def pair_indices(self):
        return self._pair_i, self._pair_j

    def observe(self) -> "Observation":
        return Observation.from_world(self)


@dataclass(frozen=True)
class Observation:
    robot_pose_px: np.ndarray
    robot_pose_um: np.ndarray
    robot_velocity_px: np.ndarray
    robot_velocity_um: np.ndarray
    robot_radius_px: float
    cells: list[dict]
    time: float
    step_count: int

    @staticmethod
    def from_world(world: WorldState) -> "Observation":
        s = world.params.um_per_px
        cells = []
        for i in range(1, world.n_bodies):
            p = world.positions[i]
            v = world.velocities[i]
            cells.append({
                "id": i,
                "position_px": p.copy(),
                "position_um": p * s,
                "velocity_px": v.copy(),
                "velocity_um": v * s,
                "radius_px": float(world.radii[i]),
                "radius_um": float(world.radii[i]) * s,
            })
        return Observation(
            robot_pose_px=world.positions[0].copy(),
            robot_pose_um=world.positions[0] * s,
            robot_velocity_px=world.velocities[0].copy(),
            robot_velocity_um=world.velocities[0] * s,
            robot_radius_px=float(world.radii[0]),
            cells=cells,
            time=world.time,
            step_count=world.step_count,
        )

    def to_dict(self) -> dict:
        """Wire form: fixed field names robot/cells/t/step, IEEE doubles."""
        return {
            "robot": {
                "pos_px": [float(x) for x in self.robot_pose_px],
                "pos_um": [float(x) for x in self.robot_pose_um],
                "vel_px": [float(x) for x in self.robot_velocity_px],
                "vel_um": [float(x) for x in self.robot_velocity_um],
                "radius_px": self.robot_radius_px,
            },
            "cells": [
                {
                    "id": c["id"],
                    "pos_px": [float(x) for x in c["position_px"]],
                    "pos_um": [float(x) for x in c["position_um"]],
                    "vel_px": [float(x) for x in c["velocity_px"]],
                    "vel_um": [float(x) for x in c["velocity_um"]],
                    "radius_px": c["radius_px"],
                }
                for c in self.cells
            ],
            "t": self.time,
            "step": self.step_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def reset(config: SceneConfig, seed: int, params: SimParams | None = None,
          layout_salt: int | None = None) -> WorldState:
    """Build a fresh world: robot plus config.n_cells cells, rejection-sampled
    from the scene substream of `seed` with no initial overlaps.

    `layout_salt` selects an alternative placement substream of the same seed
    (callers use it to redraw layouts that fail task feasibility checks); the
    noise and contact streams depend on the seed only.
    """
    params = params or SimParams()
    rng = make_stream(seed, STREAM_SCENE, salt=layout_salt)
    r_robot = config.robot_radius_px(params)
    r_cell = config.cell_radius_px(params)
    radii = np.array([r_robot] + [r_cell] * config.n_cells)
    w, h = params.width, params.height

    if config.robot_box is not None:
        bx0, by0, bx1, by1 = config.robot_box
    else:
        bx0, by0, bx1, by1 = 0.0, 0.0, w, h
    lo_r = np.maximum([bx0, by0], r_robot)
    hi_r = np.minimum([bx1, by1], [w - r_robot, h - r_robot])
    if np.any(hi_r <= lo_r):
        raise SceneError("robot sampling box leaves no room inside the workspace")

    positions = np.empty((config.n_cells + 1, 2))
    positions[0] = rng.uniform(lo_r, hi_r)

    lo_c = np.array([r_cell, r_cell])
    hi_c = np.array([w - r_cell, h - r_cell])
    placed = 1
    for attempt_budget in range(config.max_attempts * max(1, config.n_cells)):
        if placed == config.n_cells + 1:
            break
        cand = rng.uniform(lo_c, hi_c)
        gaps = (np.linalg.norm(positions[:placed] - cand, axis=1)
                - radii[:placed] - r_cell)
        if np.all(gaps >= config.min_clearance):
            positions[placed] = cand
            placed += 1
    if placed < config.n_cells + 1:
        raise SceneError(
            f"could not place {config.n_cells} cells after "
            f"{config.max_attempts * max(1, config.n_cells)} attempts")

    return WorldState(positions, radii, np.full(config.n_cells + 1, params.drag_inverse),
                      params, seed)
