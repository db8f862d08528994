"""Task-level planning for hexagonal assembly.

Maps a world snapshot to an ordered list of (cell, target vertex) subgoals:
optimal distance assignment, greedy + 2-opt execution ordering, and a local
vertex-swap refinement on a surrogate objective that combines placement cost
with the link lengths between successive subgoals.
"""

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

HEX_ROTATION = math.pi / 6
GREEDY_START_CHOICES = 3
TWO_OPT_PASSES = 4
SWAP_PASSES = 32


@dataclass(frozen=True)
class HexSpec:
    center: np.ndarray
    radius: float
    rotation: float = HEX_ROTATION
    vertex_count: int = 6

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        if self.radius <= 0:
            raise ValueError("radius must be > 0")
        if self.vertex_count < 1:
            raise ValueError("vertex_count must be >= 1")


@dataclass(frozen=True)
class Subgoal:
    cell_id: int
    vertex_index: int
    goal: np.ndarray


def hex_vertices(spec: HexSpec) -> np.ndarray:
    """(K, 2) array of regular polygon vertices."""
    j = np.arange(spec.vertex_count)
    ang = 2.0 * math.pi * j / spec.vertex_count + spec.rotation
    return spec.center[None, :] + spec.radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def default_hex_radius(cell_radius_px: float) -> float:
    """Patterning default: small inter-cell gaps at the vertices."""
    return 2.6 * cell_radius_px


def _sorted_ids(cells: dict[int, np.ndarray]) -> list[int]:
    return sorted(cells)


def assign(cells: dict[int, np.ndarray], vertices: np.ndarray,
           center: np.ndarray | None = None) -> list[tuple[int, int]]:
    """Distance-optimal matching of cells to vertices as (cell_id, vertex_index)
    pairs sorted by cell_id.

    With at least as many cells as vertices this is the optimal selection and
    assignment in one solve; with fewer cells, the available cells are matched
    to the angularly first vertices around the pattern center.
    """
    ids = _sorted_ids(cells)
    if not ids:
        return []
    k = len(vertices)
    positions = np.asarray([cells[i] for i in ids])
    if len(ids) >= k:
        vertex_cols = list(range(k))
    else:
        rel = vertices - (vertices.mean(axis=0) if center is None else np.asarray(center))
        angles = np.mod(np.arctan2(rel[:, 1], rel[:, 0]), 2.0 * math.pi)
        vertex_cols = [int(j) for j in np.lexsort((np.arange(k), angles))][:len(ids)]
        vertex_cols.sort()
    cost = np.linalg.norm(positions[:, None, :] - vertices[vertex_cols][None, :, :], axis=2)
    rows, cols = linear_sum_assignment(cost)
    pairs = [(ids[r], vertex_cols[c]) for r, c in zip(rows, cols)]
    pairs.sort()
    return pairs


def surrogate_cost(pairs: list[tuple[int, int]], sequence: list[int],
                   cells: dict[int, np.ndarray], vertices: np.ndarray,
                   robot_start: np.ndarray) -> float:
    """Placement cost plus the linking term over the execution order.

    `sequence` is the ordered list of cell ids; each link runs from the vertex
    assigned to the previous cell to the next cell's position, with the first
    link anchored at the robot start.
    """
    vertex_of = dict(pairs)
    if set(sequence) != set(vertex_of):
        raise ValueError("sequence must be a permutation of the assigned cells")
    placement = sum(float(np.linalg.norm(cells[i] - vertices[j])) for i, j in pairs)
    if not sequence:
        return placement
    linking = float(np.linalg.norm(np.asarray(robot_start, dtype=float) - cells[sequence[0]]))
    for prev, nxt in zip(sequence, sequence[1:]):
        linking += float(np.linalg.norm(vertices[vertex_of[prev]] - cells[nxt]))
    return placement + linking


def _linking_cost(sequence, vertex_of, cells, vertices, robot_start) -> float:
    total = float(np.linalg.norm(robot_start - cells[sequence[0]]))
    for prev, nxt in zip(sequence, sequence[1:]):
        total += float(np.linalg.norm(vertices[vertex_of[prev]] - cells[nxt]))
    return total


def order(pairs: list[tuple[int, int]], cells: dict[int, np.ndarray],
          vertices: np.ndarray, robot_start: np.ndarray) -> list[int]:
    """Execution order (cell ids) minimizing the linking term heuristically:
    greedy nearest-neighbor chains from a few start choices, then 2-opt."""
    if not pairs:
        return []
    robot_start = np.asarray(robot_start, dtype=float)
    vertex_of = dict(pairs)
    ids = [i for i, _ in pairs]
    if len(ids) == 1:
        return ids

    starts = sorted(ids, key=lambda i: (float(np.linalg.norm(robot_start - cells[i])), i))
    best_seq = None
    best_cost = math.inf
    for first in starts[:GREEDY_START_CHOICES]:
        seq = [first]
        remaining = [i for i in ids if i != first]
        while remaining:
            anchor = vertices[vertex_of[seq[-1]]]
            nxt = min(remaining, key=lambda i: (float(np.linalg.norm(anchor - cells[i])), i))
            seq.append(nxt)
            remaining.remove(nxt)
        cost = _linking_cost(seq, vertex_of, cells, vertices, robot_start)
        if cost < best_cost - 1e-12:
            best_cost = cost
            best_seq = seq

    for _ in range(TWO_OPT_PASSES):
        improved = None
        for a in range(len(best_seq) - 1):
            for b in range(a + 1, len(best_seq)):
                candidate = best_seq[:a] + best_seq[a:b + 1][::-1] + best_seq[b + 1:]
                cost = _linking_cost(candidate, vertex_of, cells, vertices, robot_start)
                if cost < best_cost - 1e-12:
                    best_cost = cost
                    improved = candidate
        if improved is None:
            break
        best_seq = improved
    return best_seq


def refine_swaps(pairs: list[tuple[int, int]], sequence: list[int],
                 cells: dict[int, np.ndarray], vertices: np.ndarray,
                 robot_start: np.ndarray) -> list[tuple[int, int]]:
    """Swap vertex assignments between two cells while it lowers the surrogate
    objective; the objective never increases."""
    if len(pairs) < 2:
        return list(pairs)
    vertex_of = dict(pairs)
    ids = sorted(vertex_of)
    current = surrogate_cost(sorted(vertex_of.items()), sequence, cells, vertices, robot_start)
    for _ in range(SWAP_PASSES):
        best_swap = None
        best_cost = current
        for a_pos in range(len(ids) - 1):
            for b_pos in range(a_pos + 1, len(ids)):
                a, b = ids[a_pos], ids[b_pos]
                trial = dict(vertex_of)
                trial[a], trial[b] = trial[b], trial[a]
                cost = surrogate_cost(sorted(trial.items()), sequence, cells,
                                      vertices, robot_start)
                if cost < best_cost - 1e-12:
                    best_cost = cost
                    best_swap = (a, b)
        if best_swap is None:
            break
        a, b = best_swap
        vertex_of[a], vertex_of[b] = vertex_of[b], vertex_of[a]
        current = best_cost
    return sorted(vertex_of.items())


def plan_assembly(cells: dict[int, np.ndarray], spec: HexSpec,
                  robot_start: np.ndarray, success_radius: float) -> list[Subgoal]:
    """Ordered subgoals for the remaining placements.

    Cells already parked within `success_radius` of a vertex are pinned to it
    and skipped, so the plan can be recomputed from any mid-task state.
    """
    if not cells:
        raise ValueError("need at least one cell")
    vertices = hex_vertices(spec)
    pinned_cells: set[int] = set()
    pinned_vertices: set[int] = set()
    for j in range(len(vertices)):
        near = [(float(np.linalg.norm(cells[i] - vertices[j])), i)
                for i in _sorted_ids(cells)
                if i not in pinned_cells
                and np.linalg.norm(cells[i] - vertices[j]) <= success_radius]
        if near:
            pinned_cells.add(min(near)[1])
            pinned_vertices.add(j)

    free_cells = {i: p for i, p in cells.items() if i not in pinned_cells}
    free_vertex_idx = [j for j in range(len(vertices)) if j not in pinned_vertices]
    if not free_cells or not free_vertex_idx:
        return []

    sub_vertices = vertices[free_vertex_idx]
    pairs_local = assign(free_cells, sub_vertices, center=spec.center)
    sequence = order(pairs_local, free_cells, sub_vertices, robot_start)
    refined_local = refine_swaps(pairs_local, sequence, free_cells, sub_vertices,
                                 robot_start)
    local_of = dict(refined_local)
    return [Subgoal(i, free_vertex_idx[local_of[i]], vertices[free_vertex_idx[local_of[i]]].copy())
            for i in sequence]


def subgoals_to_json(subgoals: list[Subgoal]) -> str:
    return json.dumps([
        {"cell_id": s.cell_id, "vertex_index": s.vertex_index,
         "goal": [float(s.goal[0]), float(s.goal[1])]}
        for s in subgoals
    ])
