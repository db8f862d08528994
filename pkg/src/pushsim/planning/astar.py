"""Weighted A* on an 8-connected grid over the inflated occupancy raster."""

import heapq
import math

import numpy as np

from pushsim.planning.agp import PlannerFailure, _segment_clear
from pushsim.planning.occupancy import mask_shape

SQRT2 = math.sqrt(2.0)
# neighbor order fixed for reproducibility: E, NE, N, NW, W, SW, S, SE
_NEIGHBORS = ((1, 0, 1.0), (1, 1, SQRT2), (0, 1, 1.0), (-1, 1, SQRT2),
              (-1, 0, 1.0), (-1, -1, SQRT2), (0, -1, 1.0), (1, -1, SQRT2))
# sub-pixel guard added to the inflated radius so the continuous path between
# free cell centers can never undercut the true clearance
RASTER_GUARD = 0.5


def inflated_grid(obstacles, width: float, height: float) -> np.ndarray:
    """Boolean (H, W) grid: True where a cell center is inside an inflated circle."""
    h, w = mask_shape(width, height)
    grid = np.zeros((h, w), dtype=bool)
    xs = np.arange(w) + 0.5
    ys = np.arange(h) + 0.5
    for ob in obstacles:
        r = ob.inflated_radius + RASTER_GUARD
        dx = xs - ob.center[0]
        dy = ys - ob.center[1]
        grid |= dx[None, :] ** 2 + dy[:, None] ** 2 <= r * r
    return grid


def astar_search(occupied: np.ndarray, start_cell, goal_cell,
                 weight: float = 1.0) -> tuple[list[tuple[int, int]], float]:
    """Grid path (list of (ix, iy)) and its accumulated cost.

    Cardinal moves cost 1, diagonals sqrt(2); the heuristic is Euclidean
    scaled by `weight`; with weight=1 the cost is Dijkstra-optimal. Ties on f
    prefer smaller h, then FIFO insertion.
    """
    h_dim, w_dim = occupied.shape
    sx, sy = start_cell
    gx, gy = goal_cell
    for (x, y), name in (((sx, sy), "start"), ((gx, gy), "goal")):
        if not (0 <= x < w_dim and 0 <= y < h_dim) or occupied[y, x]:
            raise PlannerFailure(f"{name} cell is not free")

    def heuristic(x, y):
        return math.hypot(x - gx, y - gy)

    g_score = {(sx, sy): 0.0}
    parents: dict[tuple[int, int], tuple[int, int]] = {}
    counter = 0
    h0 = heuristic(sx, sy)
    heap = [(weight * h0, h0, counter, sx, sy)]
    closed = set()
    while heap:
        f, _, _, x, y = heapq.heappop(heap)
        if (x, y) in closed:
            continue
        if (x, y) == (gx, gy):
            cells = [(x, y)]
            while cells[-1] in parents:
                cells.append(parents[cells[-1]])
            cells.reverse()
            return cells, g_score[(gx, gy)]
        closed.add((x, y))
        g_here = g_score[(x, y)]
        for dx, dy, cost in _NEIGHBORS:
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w_dim and 0 <= ny < h_dim) or occupied[ny, nx]:
                continue
            candidate = g_here + cost
            if candidate < g_score.get((nx, ny), math.inf) - 1e-12:
                g_score[(nx, ny)] = candidate
                parents[(nx, ny)] = (x, y)
                hn = heuristic(nx, ny)
                counter += 1
                heapq.heappush(heap, (candidate + weight * hn, hn, counter, nx, ny))
    raise PlannerFailure("goal unreachable on the inflated grid")


def _cell_center(cell) -> np.ndarray:
    return np.asarray(cell, dtype=float) + 0.5


def _attach_cell(point, occupied, obstacles, search_radius: float):
    """Free cell whose center connects to `point` without clipping any circle,
    nearest first; deterministic tie-break on (iy, ix)."""
    h_dim, w_dim = occupied.shape
    px, py = float(point[0]), float(point[1])
    cx = min(w_dim - 1, max(0, int(px)))
    cy = min(h_dim - 1, max(0, int(py)))
    reach = max(1, int(math.ceil(search_radius)))
    candidates = []
    for iy in range(max(0, cy - reach), min(h_dim, cy + reach + 1)):
        for ix in range(max(0, cx - reach), min(w_dim, cx + reach + 1)):
            if occupied[iy, ix]:
                continue
            center = _cell_center((ix, iy))
            d = math.hypot(center[0] - px, center[1] - py)
            if d <= search_radius + SQRT2:
                candidates.append((d, iy, ix))
    candidates.sort()
    for _, iy, ix in candidates:
        if _segment_clear(np.asarray(point, dtype=float), _cell_center((ix, iy)), obstacles):
            return ix, iy
    raise PlannerFailure("no connectable free cell near start/goal")


def _simplify_collinear(cells: list[tuple[int, int]]) -> list[tuple[int, int]]:
    if len(cells) <= 2:
        return cells
    out = [cells[0]]
    for k in range(1, len(cells) - 1):
        ax, ay = out[-1]
        bx, by = cells[k]
        cx, cy = cells[k + 1]
        if (bx - ax) * (cy - by) == (by - ay) * (cx - bx):
            continue
        out.append(cells[k])
    out.append(cells[-1])
    return out


def plan_astar(start, goal, obstacles, width: float, height: float,
               weight: float = 1.1, attach_radius: float = 8.0) -> np.ndarray:
    """Grid-searched polyline from start to goal against inflated circles."""
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    occupied = inflated_grid(obstacles, width, height)
    start_cell = _attach_cell(start, occupied, obstacles, attach_radius)
    goal_cell = _attach_cell(goal, occupied, obstacles, attach_radius)
    if start_cell == goal_cell:
        return np.asarray([start, goal])
    cells, _ = astar_search(occupied, start_cell, goal_cell, weight)
    cells = _simplify_collinear(cells)
    vertices = [start] + [_cell_center(c) for c in cells] + [goal]
    return np.asarray(vertices)
