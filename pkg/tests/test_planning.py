"""Geometry planning: rasterization, obstacle extraction, both planners,
resampling and the path metrics, each checked against an independent oracle
where the expected value is not a hand calculation."""

import heapq
import itertools
import math

import numpy as np
import pytest

from pushsim.params import SimParams
from pushsim.planning import (
    PlannerFailure,
    PlanRequest,
    extract_obstacles,
    min_enclosing_circle,
    path_length,
    plan_debug,
    plan_path,
    point_polyline_distance,
    rasterize,
    resample,
    turning_angle,
)
from pushsim.planning.agp import plan_agp, prune_corridor
from pushsim.planning.astar import SQRT2, astar_search, plan_astar
from pushsim.planning.occupancy import ObstacleCircle
from pushsim.rng import STREAM_SCENE, make_stream
from pushsim.world import SceneConfig, reset


def circle(x, y, r_obs, r_move):
    return ObstacleCircle(np.array([x, y], dtype=float), r_obs, r_obs + r_move)


def dense_clearance(polyline, center, samples=10_000):
    """Oracle: min distance from densely sampled path points to a center."""
    pts = np.asarray(polyline)
    seg = pts[1:] - pts[:-1]
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    total = lengths.sum()
    best = math.inf
    for s in np.linspace(0.0, total, samples):
        acc = 0.0
        for i, L in enumerate(lengths):
            if s <= acc + L or i == len(lengths) - 1:
                frac = 0.0 if L == 0 else (s - acc) / L
                p = pts[i] + frac * seg[i]
                best = min(best, float(np.linalg.norm(p - center)))
                break
            acc += L
    return best


class TestRasterize:
    def test_empty_world_all_free(self):
        mask = rasterize(np.empty((0, 2)), np.empty(0), 200, 140)
        assert mask.shape == (140, 200)
        assert not mask.any()

    def test_disk_area_near_analytic(self):
        r = 4.17
        mask = rasterize([[100.0, 70.0]], [r], 200, 140)
        count = int(mask.sum())
        assert abs(count - math.pi * r * r) <= 2 * math.pi * r + 4

    def test_excluded_body_leaves_free_space(self):
        mask = rasterize([[100.0, 70.0], [50.0, 50.0]], [4.17, 4.17], 200, 140,
                         exclude={0})
        assert not mask[70, 100]
        assert mask[50, 50]


class TestMinEnclosingCircle:
    def brute_force(self, pts):
        """Oracle: smallest circle among all 2- and 3-point support sets."""
        pts = np.asarray(pts, dtype=float)
        best = (None, math.inf)

        def consider(center, radius):
            nonlocal best
            if radius < best[1] and np.all(
                    np.linalg.norm(pts - center, axis=1) <= radius + 1e-9):
                best = (center, radius)

        for a, b in itertools.combinations(range(len(pts)), 2):
            center = 0.5 * (pts[a] + pts[b])
            consider(center, float(np.linalg.norm(pts[a] - center)))
        for a, b, c in itertools.combinations(range(len(pts)), 3):
            ax, ay = pts[a]
            bx, by = pts[b]
            cx, cy = pts[c]
            d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
            if d == 0:
                continue
            ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay)
                  + (cx**2 + cy**2) * (ay - by)) / d
            uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx)
                  + (cx**2 + cy**2) * (bx - ax)) / d
            center = np.array([ux, uy])
            consider(center, float(np.linalg.norm(pts[a] - center)))
        return best

    def test_matches_brute_force_on_random_sets(self):
        rng = make_stream(7, STREAM_SCENE)
        for _ in range(60):
            pts = rng.uniform(0, 100, size=(int(rng.integers(3, 9)), 2))
            center, radius = min_enclosing_circle(pts)
            _, expected = self.brute_force(pts)
            assert radius == pytest.approx(expected, abs=1e-6)
            assert np.all(np.linalg.norm(pts - center, axis=1) <= radius + 1e-9)

    def test_single_point(self):
        center, radius = min_enclosing_circle([[3.0, 4.0]])
        assert radius == 0.0
        assert center == pytest.approx([3.0, 4.0])


class TestExtractObstacles:
    def test_empty_mask(self):
        assert extract_obstacles(np.zeros((10, 10), dtype=bool), 4.0) == []

    def test_recovers_disk_radius_within_raster_quantization(self):
        mask = rasterize([[100.0, 70.0]], [4.0], 200, 140)
        obstacles = extract_obstacles(mask, 4.0)
        assert len(obstacles) == 1
        assert 4.0 <= obstacles[0].radius <= 5.0
        assert obstacles[0].center == pytest.approx([100.0, 70.0], abs=1.0)

    def test_inflation_arithmetic(self):
        ob = circle(0, 0, 4.17, 4.17)
        assert ob.inflated_radius == pytest.approx(8.34)

    def test_count_and_radii_for_separated_disks(self):
        centers = [[40.0, 40.0], [120.0, 100.0], [170.0, 30.0]]
        mask = rasterize(centers, [4.17, 5.0, 3.0], 200, 140)
        obstacles = extract_obstacles(mask, 1.0)
        assert len(obstacles) == 3
        got = sorted(ob.radius for ob in obstacles)
        for recovered, truth in zip(got, sorted([4.17, 5.0, 3.0])):
            assert abs(recovered - truth) <= 1.0

    def test_touching_disks_merge_into_one_component(self):
        mask = rasterize([[50.0, 50.0], [56.0, 50.0]], [4.0, 4.0], 200, 140)
        assert len(extract_obstacles(mask, 1.0)) == 1


class TestAgp:
    def test_no_obstacles_straight(self):
        path = plan_agp([10.0, 10.0], [90.0, 50.0], [])
        assert path == pytest.approx(np.array([[10.0, 10.0], [90.0, 50.0]]))

    def test_single_blocking_circle_detour_clearance(self):
        ob = circle(50.0, 30.0, 4.0, 4.0)
        path = plan_agp([10.0, 30.0], [90.0, 30.0], [ob])
        assert len(path) >= 3
        assert dense_clearance(path, ob.center) >= ob.inflated_radius - 1e-6

    def test_far_obstacle_pruned_straight_path(self):
        ob = circle(50.0, 80.0, 4.0, 4.0)  # 50 px off-corridor >> 3 * 8
        kept = prune_corridor(np.array([10.0, 30.0]), np.array([90.0, 30.0]), [ob], 3.0)
        assert kept == []
        path = plan_agp([10.0, 30.0], [90.0, 30.0], [ob])
        assert len(path) == 2

    def test_length_at_least_straight_line(self):
        rng = make_stream(13, STREAM_SCENE)
        for _ in range(25):
            obstacles = [circle(rng.uniform(30, 170), rng.uniform(30, 110), 4.17, 4.17)
                         for _ in range(int(rng.integers(0, 6)))]
            start = np.array([10.0, 10.0])
            goal = np.array([190.0, 130.0])
            if any(np.linalg.norm(start - ob.center) <= ob.inflated_radius
                   or np.linalg.norm(goal - ob.center) <= ob.inflated_radius
                   for ob in obstacles):
                continue
            try:
                path = plan_agp(start, goal, obstacles)
            except PlannerFailure:
                continue
            straight = float(np.linalg.norm(goal - start))
            assert path_length(path) >= straight - 1e-9
            for ob in obstacles:
                assert dense_clearance(path, ob.center) >= ob.inflated_radius - 1e-6

    def test_unpruned_replan_keeps_full_clearance(self):
        # a detour around the corridor blocker would graze this off-corridor circle
        blocker = circle(100.0, 70.0, 8.0, 4.0)
        bystander = circle(100.0, 110.0, 8.0, 4.0)
        path = plan_agp([20.0, 70.0], [180.0, 70.0], [blocker, bystander])
        for ob in (blocker, bystander):
            assert dense_clearance(path, ob.center) >= ob.inflated_radius - 1e-6


def dijkstra_cost(occupied, start, goal):
    """Oracle: uniform-cost search with the same move costs."""
    h_dim, w_dim = occupied.shape
    dist = {start: 0.0}
    heap = [(0.0, start)]
    seen = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in seen:
            continue
        if node == goal:
            return d
        seen.add(node)
        x, y = node
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if dx == dy == 0:
                    continue
                nx, ny = x + dx, y + dy
                if not (0 <= nx < w_dim and 0 <= ny < h_dim) or occupied[ny, nx]:
                    continue
                step = SQRT2 if dx and dy else 1.0
                nd = d + step
                if nd < dist.get((nx, ny), math.inf):
                    dist[(nx, ny)] = nd
                    heapq.heappush(heap, (nd, (nx, ny)))
    return None


class TestAstar:
    def test_empty_grid_close_to_euclidean(self):
        path = plan_astar([5.0, 5.0], [180.0, 120.0], [], 200, 140, weight=1.1)
        euclid = float(np.hypot(175.0, 115.0))
        assert path_length(path) <= 1.08 * euclid + 2.0

    def test_weight_one_matches_dijkstra_on_random_grids(self):
        rng = make_stream(99, STREAM_SCENE)
        checked = 0
        while checked < 50:
            occupied = rng.uniform(size=(64, 64)) < 0.25
            sx, sy, gx, gy = (int(v) for v in rng.integers(0, 64, size=4))
            if occupied[sy, sx] or occupied[gy, gx] or (sx, sy) == (gx, gy):
                continue
            expected = dijkstra_cost(occupied, (sx, sy), (gx, gy))
            if expected is None:
                with pytest.raises(PlannerFailure):
                    astar_search(occupied, (sx, sy), (gx, gy), weight=1.0)
                continue
            _, cost = astar_search(occupied, (sx, sy), (gx, gy), weight=1.0)
            assert cost == pytest.approx(expected, abs=1e-9)
            checked += 1

    def test_walled_off_goal_fails(self):
        occupied = np.zeros((32, 32), dtype=bool)
        occupied[10:21, 10] = True
        occupied[10:21, 20] = True
        occupied[10, 10:21] = True
        occupied[20, 10:21] = True
        with pytest.raises(PlannerFailure):
            astar_search(occupied, (2, 2), (15, 15), weight=1.0)

    def test_polyline_respects_inflated_clearance(self):
        obstacles = [circle(80.0, 60.0, 4.17, 4.17), circle(110.0, 80.0, 4.17, 4.17),
                     circle(60.0, 90.0, 4.17, 4.17)]
        path = plan_astar([10.0, 10.0], [190.0, 130.0], obstacles, 200, 140)
        for ob in obstacles:
            assert dense_clearance(path, ob.center) >= ob.inflated_radius - 1e-6


class TestResample:
    def test_straight_segment_spacing(self):
        out = resample([[0.0, 0.0], [10.0, 0.0]], 3.0)
        assert out[:, 0] == pytest.approx([0.0, 3.0, 6.0, 9.0, 10.0])
        assert np.all(out[:, 1] == 0.0)

    def test_short_polyline_endpoints_only(self):
        out = resample([[0.0, 0.0], [1.0, 1.0]], 3.0)
        assert out == pytest.approx(np.array([[0.0, 0.0], [1.0, 1.0]]))

    def test_l_shape_matches_cumulative_length_oracle(self):
        # legs of 4.5 + 4.5; corner must survive and length must be preserved
        poly = [[0.0, 0.0], [4.5, 0.0], [4.5, 4.5]]
        out = resample(poly, 2.0)
        assert path_length(out) == pytest.approx(9.0, abs=1e-9)
        # oracle: walk the original polyline to each expected arc position
        expected_arcs = [0.0, 2.0, 4.0, 4.5, 6.0, 8.0, 9.0]
        got_arcs = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(out, axis=0).T))])
        assert got_arcs == pytest.approx(expected_arcs, abs=1e-9)

    def test_idempotent(self):
        rng = make_stream(5, STREAM_SCENE)
        for _ in range(20):
            pts = rng.uniform(0, 100, size=(int(rng.integers(2, 8)), 2))
            once = resample(pts, 3.0)
            twice = resample(once, 3.0)
            assert len(once) == len(twice)
            assert once == pytest.approx(twice, abs=1e-9)

    def test_spacing_bound_holds(self):
        rng = make_stream(6, STREAM_SCENE)
        for _ in range(20):
            pts = rng.uniform(0, 100, size=(int(rng.integers(2, 8)), 2))
            out = resample(pts, 3.0)
            gaps = np.hypot(*np.diff(out, axis=0).T)
            assert np.all(gaps <= 3.0 + 1e-9)
            assert path_length(out) == pytest.approx(path_length(pts), abs=1e-9)


class TestPathMetrics:
    def test_straight_line_zero_turning(self):
        line = resample([[0.0, 0.0], [30.0, 0.0]], 3.0)
        assert turning_angle(line) == pytest.approx(0.0)

    def test_right_angle(self):
        assert turning_angle([[0, 0], [1, 0], [1, 1]]) == pytest.approx(math.pi / 2)

    def test_hexagon_boundary_total_turn(self):
        # traversing all 6 edges makes 5 interior direction changes of pi/3
        angles = [2 * math.pi * j / 6 for j in range(6)]
        verts = [[math.cos(a), math.sin(a)] for a in angles] + [[1.0, 0.0]]
        assert turning_angle(verts) == pytest.approx(5 * math.pi / 3)

    def test_point_polyline_distance(self):
        assert point_polyline_distance([0.0, 1.0], [[0.0, 0.0], [2.0, 0.0]]) == pytest.approx(1.0)
        assert point_polyline_distance([1.0, 0.0], [[0.0, 0.0], [2.0, 0.0]]) == 0.0


class TestFacade:
    def make_world(self, seed=3):
        return reset(SceneConfig(n_cells=12), seed=seed)

    def test_plan_path_clearance_both_planners(self):
        world = self.make_world()
        r_move = float(world.radii[0])
        req = PlanRequest(world.positions[0], np.array([185.0, 125.0]), r_move,
                          excluded_ids={0})
        mask_obstacles = extract_obstacles(
            rasterize(world.positions, world.radii, world.params.width,
                      world.params.height, exclude={0}), r_move)
        for planner in ("agp", "astar"):
            path = plan_path(world, req, planner=planner)
            assert np.allclose(path[0], req.start) and np.allclose(path[-1], req.goal)
            for ob in mask_obstacles:
                assert dense_clearance(path, ob.center, samples=4000) \
                    >= ob.inflated_radius - 1e-6

    def test_debug_dump_fields(self):
        world = self.make_world()
        req = PlanRequest(world.positions[0], np.array([185.0, 125.0]),
                          float(world.radii[0]), excluded_ids={0})
        dump = plan_debug(world, req, planner="agp")
        assert dump["mask"] == {"width": 200, "height": 140}
        assert len(dump["obstacles"]) >= 1
        assert len(dump["polyline"]) >= 2

    def test_identical_start_goal_rejected(self):
        with pytest.raises(ValueError):
            PlanRequest(np.zeros(2), np.zeros(2), 4.0)
