"""Planning facade: rasterize a world snapshot, extract inflated obstacles,
nudge infeasible endpoints, run the selected planner and resample the result."""

import json
from dataclasses import dataclass, field

import numpy as np

from pushsim.planning.agp import PlannerFailure, plan_agp
from pushsim.planning.astar import plan_astar
from pushsim.planning.occupancy import extract_obstacles, rasterize
from pushsim.planning.polyline import resample

DEFAULT_SPACING = 3.0        # resampled waypoint spacing [px]
DEFAULT_CORRIDOR_ALPHA = 3.0
DEFAULT_ASTAR_WEIGHT = 1.1


@dataclass(frozen=True)
class PlanRequest:
    start: np.ndarray
    goal: np.ndarray
    moving_radius: float
    excluded_ids: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "start", np.asarray(self.start, dtype=float))
        object.__setattr__(self, "goal", np.asarray(self.goal, dtype=float))
        object.__setattr__(self, "excluded_ids", frozenset(self.excluded_ids))
        if self.moving_radius <= 0:
            raise ValueError("moving_radius must be > 0")
        if np.array_equal(self.start, self.goal):
            raise ValueError("start and goal coincide")


def nudge_free(point, obstacles, max_shift: float) -> np.ndarray:
    """Push a point out of any inflated circle it sits in, up to max_shift."""
    p = np.asarray(point, dtype=float).copy()
    for _ in range(8):
        inside = [ob for ob in obstacles
                  if np.linalg.norm(p - ob.center) < ob.inflated_radius]
        if not inside:
            break
        deepest = max(inside, key=lambda ob: ob.inflated_radius - np.linalg.norm(p - ob.center))
        rel = p - deepest.center
        dist = float(np.linalg.norm(rel))
        if dist == 0.0:
            rel = np.array([1.0, 0.0])
            dist = 1.0
        p = deepest.center + (deepest.inflated_radius + 1e-6) * rel / dist
    else:
        raise PlannerFailure("could not nudge endpoint into free space")
    if np.linalg.norm(p - np.asarray(point, dtype=float)) > max_shift:
        raise PlannerFailure("endpoint too deep inside inflated space")
    return p


def plan_path(world, request: PlanRequest, planner: str = "agp",
              spacing: float = DEFAULT_SPACING,
              corridor_alpha: float = DEFAULT_CORRIDOR_ALPHA,
              astar_weight: float = DEFAULT_ASTAR_WEIGHT) -> np.ndarray:
    """Collision-free resampled polyline from request.start to request.goal."""
    params = world.params
    mask = rasterize(world.positions, world.radii, params.width, params.height,
                     exclude=request.excluded_ids)
    obstacles = extract_obstacles(mask, request.moving_radius)
    max_shift = 2.0 * request.moving_radius
    start = nudge_free(request.start, obstacles, max_shift)
    goal = nudge_free(request.goal, obstacles, max_shift)
    if planner == "agp":
        path = plan_agp(start, goal, obstacles, corridor_alpha)
    elif planner == "astar":
        path = plan_astar(start, goal, obstacles, params.width, params.height,
                          weight=astar_weight,
                          attach_radius=max(2.0 * request.moving_radius, 3.0))
    else:
        raise ValueError(f"unknown planner {planner!r}")
    return resample(path, spacing)


def plan_debug(world, request: PlanRequest, planner: str = "agp", **kwargs) -> dict:
    """Replay-friendly dump: mask dimensions, extracted circles, final polyline."""
    params = world.params
    mask = rasterize(world.positions, world.radii, params.width, params.height,
                     exclude=request.excluded_ids)
    obstacles = extract_obstacles(mask, request.moving_radius)
    path = plan_path(world, request, planner=planner, **kwargs)
    return {
        "mask": {"width": mask.shape[1], "height": mask.shape[0]},
        "obstacles": [
            {"center": [float(c) for c in ob.center],
             "radius": ob.radius,
             "inflated_radius": ob.inflated_radius}
            for ob in obstacles
        ],
        "polyline": [[float(x), float(y)] for x, y in path],
        "planner": planner,
    }


def plan_debug_json(world, request: PlanRequest, planner: str = "agp", **kwargs) -> str:
    return json.dumps(plan_debug(world, request, planner=planner, **kwargs))
