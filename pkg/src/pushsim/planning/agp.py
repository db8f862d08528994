"""Continuous-geometry planner over inflated obstacle circles.

Three stages: prune circles irrelevant to the straight start-goal corridor,
hop waypoints along tangents of the nearest blocking circle while keeping
forward progress, then connect the waypoints into a polyline. Every accepted
segment is verified against the working obstacle set, and the finished path
is re-verified against the full set (re-planning without pruning if a pruned
circle turns out to matter), so the clearance postcondition always holds.
"""

import math

import numpy as np

from pushsim.planning.occupancy import ObstacleCircle
from pushsim.planning.polyline import point_segment_distance

MAX_WAYPOINTS = 64
TANGENT_MARGIN = 0.5  # px pushed radially outward from the inflated circle


class PlannerFailure(RuntimeError):
    """The planner could not produce a collision-free path."""


def prune_corridor(start, goal, obstacles, corridor_alpha: float):
    """Keep circles within alpha*R of the start-goal segment or within R of
    either endpoint."""
    kept = []
    for ob in obstacles:
        d_seg = point_segment_distance(ob.center, start, goal)
        if (d_seg <= corridor_alpha * ob.inflated_radius
                or np.linalg.norm(ob.center - start) <= ob.inflated_radius
                or np.linalg.norm(ob.center - goal) <= ob.inflated_radius):
            kept.append(ob)
    return kept


def _segment_clear(a, b, obstacles, eps=1e-9) -> bool:
    for ob in obstacles:
        if point_segment_distance(ob.center, a, b) < ob.inflated_radius - eps:
            return False
    return True


def _point_clear(p, obstacles, eps=1e-9) -> bool:
    return all(np.linalg.norm(p - ob.center) >= ob.inflated_radius - eps
               for ob in obstacles)


def _first_blocker(a, b, obstacles) -> ObstacleCircle | None:
    """Blocking circle whose entry point lies closest to `a` along segment ab."""
    ab = b - a
    length = float(np.linalg.norm(ab))
    if length == 0.0:
        return None
    direction = ab / length
    best = None
    best_entry = math.inf
    for ob in obstacles:
        if point_segment_distance(ob.center, a, b) >= ob.inflated_radius:
            continue
        t_center = float((ob.center - a) @ direction)
        d_perp_sq = float(np.linalg.norm(ob.center - a) ** 2) - t_center ** 2
        half_chord = math.sqrt(max(0.0, ob.inflated_radius ** 2 - max(0.0, d_perp_sq)))
        entry = max(0.0, t_center - half_chord)
        if entry < best_entry:
            best_entry = entry
            best = ob
    return best


def _tangent_candidates(p, ob: ObstacleCircle):
    """Tangent contact points from p to the circle, pushed radially outward."""
    rel = p - ob.center
    dist = float(np.linalg.norm(rel))
    radius = ob.inflated_radius
    if dist <= radius:
        return []
    phi = math.atan2(rel[1], rel[0])
    beta = math.acos(radius / dist)
    out_r = radius + TANGENT_MARGIN
    return [ob.center + out_r * np.array([math.cos(phi + s * beta),
                                          math.sin(phi + s * beta)])
            for s in (1.0, -1.0)]


def _turn_cost(prev_dir, current, candidate) -> float:
    step_vec = candidate - current
    norm = float(np.linalg.norm(step_vec))
    if norm == 0.0 or prev_dir is None:
        return 0.0
    cos_turn = float(np.clip(prev_dir @ (step_vec / norm), -1.0, 1.0))
    return math.acos(cos_turn)


def plan_agp(start, goal, obstacles, corridor_alpha: float = 3.0) -> np.ndarray:
    """Collision-free polyline from start to goal around inflated circles.

    Raises PlannerFailure when no collision-free advance exists within the
    waypoint budget (callers typically fall back to grid search).
    """
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    working = prune_corridor(start, goal, obstacles, corridor_alpha)
    if not (_point_clear(start, working) and _point_clear(goal, working)):
        raise PlannerFailure("start or goal lies inside an inflated obstacle")

    path = _advance_waypoints(start, goal, working)

    # pruned circles must not invalidate the result; replan unpruned if they do
    if len(working) != len(obstacles):
        for i in range(len(path) - 1):
            if not _segment_clear(path[i], path[i + 1], obstacles):
                path = _advance_waypoints(start, goal, list(obstacles))
                break
    return path


def _advance_waypoints(start, goal, obstacles) -> np.ndarray:
    waypoints = [start]
    current = start
    prev_dir = None
    for _ in range(MAX_WAYPOINTS):
        blocker = _first_blocker(current, goal, obstacles)
        if blocker is None:
            waypoints.append(goal)
            return np.asarray(waypoints)
        candidates = []
        for cand in _tangent_candidates(current, blocker):
            if not _point_clear(cand, obstacles):
                continue
            if not _segment_clear(current, cand, obstacles):
                continue
            if any(np.linalg.norm(cand - w) < 1e-9 for w in waypoints):
                continue  # progress guard: never revisit a waypoint
            candidates.append(cand)
        if not candidates:
            raise PlannerFailure("no collision-free advance from waypoint")
        candidates.sort(key=lambda q: (float(np.linalg.norm(goal - q)),
                                       _turn_cost(prev_dir, current, q)))
        chosen = candidates[0]
        step_vec = chosen - current
        prev_dir = step_vec / np.linalg.norm(step_vec)
        waypoints.append(chosen)
        current = chosen
    raise PlannerFailure(f"no path within {MAX_WAYPOINTS} waypoints")
