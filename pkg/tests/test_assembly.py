"""Task planner: assignment, ordering and refinement against brute-force oracles."""

import itertools
import math

import numpy as np
import pytest

from pushsim.assembly import (
    HexSpec,
    Subgoal,
    assign,
    default_hex_radius,
    hex_vertices,
    order,
    plan_assembly,
    refine_swaps,
    subgoals_to_json,
    surrogate_cost,
)
from pushsim.rng import STREAM_SCENE, make_stream


def brute_force_assignment_cost(positions, ids, vertices):
    """Oracle: minimum distance sum over all cell selections and permutations."""
    k = len(vertices)
    best = math.inf
    for subset in itertools.permutations(range(len(ids)), k):
        cost = sum(float(np.linalg.norm(positions[r] - vertices[j]))
                   for j, r in enumerate(subset))
        best = min(best, cost)
    return best


def assignment_cost(pairs, cells, vertices):
    return sum(float(np.linalg.norm(cells[i] - vertices[j])) for i, j in pairs)


class TestHexVertices:
    def test_first_vertex_closed_form(self):
        v = hex_vertices(HexSpec(np.zeros(2), 1.0))
        assert v[0] == pytest.approx([math.sqrt(3) / 2, 0.5])

    def test_all_on_circle(self):
        spec = HexSpec(np.array([30.0, 40.0]), 7.5)
        v = hex_vertices(spec)
        assert np.linalg.norm(v - spec.center, axis=1) == pytest.approx(np.full(6, 7.5))

    def test_default_radius_from_cell_size(self):
        assert default_hex_radius(5.0 / 1.2) == pytest.approx(10.83, abs=0.01)

    def test_rotation_by_sixth_turn_permutes_vertices(self):
        a = hex_vertices(HexSpec(np.zeros(2), 2.0, rotation=math.pi / 6))
        b = hex_vertices(HexSpec(np.zeros(2), 2.0, rotation=math.pi / 6 + 2 * math.pi / 6))
        assert b == pytest.approx(np.roll(a, -1, axis=0))


class TestAssign:
    def test_cells_on_vertices_identity_zero_cost(self):
        vertices = hex_vertices(HexSpec(np.array([100.0, 70.0]), 10.0))
        cells = {i + 1: vertices[i].copy() for i in range(6)}
        pairs = assign(cells, vertices)
        assert pairs == [(i + 1, i) for i in range(6)]
        assert assignment_cost(pairs, cells, vertices) == pytest.approx(0.0)

    def test_matches_exhaustive_oracle_8x6(self):
        rng = make_stream(17, STREAM_SCENE)
        vertices = hex_vertices(HexSpec(np.array([100.0, 70.0]), 10.83))
        for _ in range(20):
            ids = list(range(1, 9))
            positions = rng.uniform([10, 10], [190, 130], size=(8, 2))
            cells = dict(zip(ids, positions))
            pairs = assign(cells, vertices)
            got = assignment_cost(pairs, cells, vertices)
            expected = brute_force_assignment_cost(positions, ids, vertices)
            assert got == pytest.approx(expected, abs=1e-9)

    def test_fewer_cells_use_angularly_first_vertices(self):
        spec = HexSpec(np.array([100.0, 70.0]), 10.0)
        vertices = hex_vertices(spec)
        rng = make_stream(1, STREAM_SCENE)
        cells = {i: rng.uniform([50, 50], [150, 90]) for i in (1, 2, 3)}
        pairs = assign(cells, vertices, center=spec.center)
        assert sorted(j for _, j in pairs) == [0, 1, 2]
        assert len(pairs) == 3


class TestSurrogateCost:
    def test_k1(self):
        cells = {4: np.array([10.0, 0.0])}
        vertices = np.array([[20.0, 0.0]])
        s = np.array([0.0, 0.0])
        j = surrogate_cost([(4, 0)], [4], cells, vertices, s)
        assert j == pytest.approx(10.0 + 10.0)

    def test_placement_term_zero_when_cells_on_vertices(self):
        vertices = hex_vertices(HexSpec(np.array([0.0, 0.0]), 5.0))
        cells = {i: vertices[i].copy() for i in range(6)}
        pairs = [(i, i) for i in range(6)]
        seq = list(range(6))
        j = surrogate_cost(pairs, seq, cells, vertices, cells[0])
        links = sum(float(np.linalg.norm(vertices[t] - vertices[t + 1])) for t in range(5))
        assert j == pytest.approx(links)

    def test_matches_independent_formula(self):
        rng = make_stream(23, STREAM_SCENE)
        for _ in range(30):
            cells = {i: rng.uniform(0, 100, 2) for i in (1, 2, 3)}
            vertices = rng.uniform(0, 100, (3, 2))
            s = rng.uniform(0, 100, 2)
            pairs = [(1, 0), (2, 1), (3, 2)]
            seq = [2, 1, 3]
            # independent re-implementation of the objective
            expected = (np.linalg.norm(cells[1] - vertices[0])
                        + np.linalg.norm(cells[2] - vertices[1])
                        + np.linalg.norm(cells[3] - vertices[2])
                        + np.linalg.norm(s - cells[2])
                        + np.linalg.norm(vertices[1] - cells[1])
                        + np.linalg.norm(vertices[0] - cells[3]))
            got = surrogate_cost(pairs, seq, cells, vertices, s)
            assert got == pytest.approx(float(expected), abs=1e-9)


class TestOrder:
    def test_single_pair(self):
        cells = {5: np.array([1.0, 1.0])}
        assert order([(5, 0)], cells, np.array([[2.0, 2.0]]), np.zeros(2)) == [5]

    def test_collinear_targets_swept_monotonically(self):
        # cells and vertices interleaved on a line, robot at the left end:
        # brute force over all 6! orders confirms the monotone sweep is optimal
        cells = {i + 1: np.array([20.0 * i, 0.0]) for i in range(6)}
        vertices = np.array([[20.0 * i + 5.0, 0.0] for i in range(6)])
        pairs = [(i + 1, i) for i in range(6)]
        s = np.array([-10.0, 0.0])
        seq = order(pairs, cells, vertices, s)
        assert seq == [1, 2, 3, 4, 5, 6]
        vertex_of = dict(pairs)

        def linking(sequence):
            total = float(np.linalg.norm(s - cells[sequence[0]]))
            for prev, nxt in zip(sequence, sequence[1:]):
                total += float(np.linalg.norm(vertices[vertex_of[prev]] - cells[nxt]))
            return total

        best = min(linking(list(p)) for p in itertools.permutations(range(1, 7)))
        assert linking(seq) == pytest.approx(best, abs=1e-9)

    def test_two_opt_never_worse_than_greedy(self):
        rng = make_stream(31, STREAM_SCENE)
        for _ in range(20):
            cells = {i: rng.uniform(0, 100, 2) for i in range(1, 7)}
            vertices = rng.uniform(0, 100, (6, 2))
            pairs = [(i, i - 1) for i in range(1, 7)]
            s = rng.uniform(0, 100, 2)
            seq = order(pairs, cells, vertices, s)
            vertex_of = dict(pairs)
            # greedy-only baseline from the nearest start
            first = min(cells, key=lambda i: (float(np.linalg.norm(s - cells[i])), i))
            greedy = [first]
            remaining = [i for i in cells if i != first]
            while remaining:
                anchor = vertices[vertex_of[greedy[-1]]]
                nxt = min(remaining, key=lambda i: (float(np.linalg.norm(anchor - cells[i])), i))
                greedy.append(nxt)
                remaining.remove(nxt)

            def linking(sequence):
                total = float(np.linalg.norm(s - cells[sequence[0]]))
                for prev, nxt in zip(sequence, sequence[1:]):
                    total += float(np.linalg.norm(vertices[vertex_of[prev]] - cells[nxt]))
                return total

            assert linking(seq) <= linking(greedy) + 1e-9


class TestRefineSwaps:
    def test_crossed_pair_uncrossed(self):
        cells = {1: np.array([0.0, 0.0]), 2: np.array([10.0, 0.0])}
        vertices = np.array([[10.0, 1.0], [0.0, 1.0]])  # crossed under (1,0),(2,1)
        pairs = [(1, 0), (2, 1)]
        refined = refine_swaps(pairs, [1, 2], cells, vertices, np.array([0.0, -5.0]))
        assert refined == [(1, 1), (2, 0)]

    def test_already_optimal_unchanged(self):
        cells = {1: np.array([0.0, 0.0]), 2: np.array([10.0, 0.0])}
        vertices = np.array([[0.0, 1.0], [10.0, 1.0]])
        pairs = [(1, 0), (2, 1)]
        assert refine_swaps(pairs, [1, 2], cells, vertices, np.zeros(2)) == pairs

    def test_objective_never_increases(self):
        rng = make_stream(41, STREAM_SCENE)
        for _ in range(30):
            cells = {i: rng.uniform(0, 100, 2) for i in range(1, 7)}
            vertices = rng.uniform(0, 100, (6, 2))
            perm = rng.permutation(6)
            pairs = sorted((i + 1, int(perm[i])) for i in range(6))
            seq = [int(i) for i in rng.permutation(range(1, 7))]
            s = rng.uniform(0, 100, 2)
            before = surrogate_cost(pairs, seq, cells, vertices, s)
            refined = refine_swaps(pairs, seq, cells, vertices, s)
            after = surrogate_cost(refined, seq, cells, vertices, s)
            assert after <= before + 1e-9


class TestPlanAssembly:
    SPEC = HexSpec(np.array([100.0, 70.0]), 10.83)

    def test_all_placed_empty_plan(self):
        vertices = hex_vertices(self.SPEC)
        cells = {i + 1: vertices[i] + 0.1 for i in range(6)}
        plan = plan_assembly(cells, self.SPEC, np.array([10.0, 10.0]), success_radius=0.5)
        assert plan == []

    def test_deterministic(self):
        rng = make_stream(3, STREAM_SCENE)
        cells = {i: rng.uniform([10, 10], [190, 130]) for i in range(1, 21)}
        a = plan_assembly(cells, self.SPEC, np.array([10.0, 10.0]), 0.5)
        b = plan_assembly(dict(cells), self.SPEC, np.array([10.0, 10.0]), 0.5)
        assert [(s.cell_id, s.vertex_index) for s in a] == \
               [(s.cell_id, s.vertex_index) for s in b]
        assert len(a) == 6

    def test_midtask_replan_pins_placed_cells(self):
        vertices = hex_vertices(self.SPEC)
        rng = make_stream(9, STREAM_SCENE)
        cells = {i: rng.uniform([10, 10], [190, 130]) for i in range(1, 9)}
        # park two cells on vertices 0 and 3
        cells[1] = vertices[0] + np.array([0.1, 0.0])
        cells[2] = vertices[3] - np.array([0.0, 0.2])
        plan = plan_assembly(cells, self.SPEC, np.array([10.0, 10.0]), 0.5)
        assert len(plan) == 4
        planned_cells = {s.cell_id for s in plan}
        assert 1 not in planned_cells and 2 not in planned_cells
        assert sorted(s.vertex_index for s in plan) == [1, 2, 4, 5]

    def test_json_serialization(self):
        plan = [Subgoal(3, 1, np.array([1.0, 2.0]))]
        assert subgoals_to_json(plan) == \
            '[{"cell_id": 3, "vertex_index": 1, "goal": [1.0, 2.0]}]'
