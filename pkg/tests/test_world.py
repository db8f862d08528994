"""Scene generation, observations and the parameter file format."""

import json

import numpy as np
import pytest

from pushsim.params import SimParams, dump_param_text, parse_param_text
from pushsim.world import SceneConfig, SceneError, reset


class TestReset:
    def test_same_seed_identical(self):
        a = reset(SceneConfig(), seed=7)
        b = reset(SceneConfig(), seed=7)
        assert np.array_equal(a.positions, b.positions)

    def test_default_scene_has_positive_gaps(self):
        world = reset(SceneConfig(n_cells=20), seed=3)
        assert world.n_bodies == 21
        i, j = world.pair_indices()
        d = np.linalg.norm(world.positions[i] - world.positions[j], axis=1)
        assert np.all(d - world.radii[i] - world.radii[j] > 0.0)

    def test_robot_only(self):
        world = reset(SceneConfig(n_cells=0), seed=1)
        assert world.n_bodies == 1
        assert world.cells() == []

    def test_radius_scale(self):
        world = reset(SceneConfig(n_cells=1), seed=0)
        assert world.radii[0] == pytest.approx(5.0 / 1.2)

    def test_infeasible_packing_raises(self):
        tiny = SimParams(width=30.0, height=30.0)
        with pytest.raises(SceneError):
            reset(SceneConfig(n_cells=50, max_attempts=20), seed=0, params=tiny)

    def test_robot_box_respected(self):
        cfg = SceneConfig(n_cells=0, robot_box=(0.0, 0.0, 30.0, 21.0))
        for seed in range(10):
            world = reset(cfg, seed=seed)
            x, y = world.positions[0]
            assert world.radii[0] <= x <= 30.0
            assert world.radii[0] <= y <= 21.0


class TestObservation:
    def test_um_fields_are_exact_scalings(self):
        world = reset(SceneConfig(n_cells=5), seed=2)
        obs = world.observe()
        s = world.params.um_per_px
        assert np.array_equal(obs.robot_pose_um, obs.robot_pose_px * s)
        for cell in obs.cells:
            assert np.array_equal(cell["position_um"], cell["position_px"] * s)

    def test_json_wire_fields(self):
        obs = reset(SceneConfig(n_cells=2), seed=2).observe()
        payload = json.loads(obs.to_json())
        assert set(payload) == {"robot", "cells", "t", "step"}
        assert len(payload["cells"]) == 2
        assert payload["step"] == 0


class TestParamFile:
    def test_roundtrip(self):
        params = SimParams(flow_enabled=True, hertz_stiffness=12.5)
        again = parse_param_text(dump_param_text(params))
        assert again == params

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown parameter"):
            parse_param_text("gravity = 9.81")

    def test_comments_and_blank_lines(self):
        params = parse_param_text("# comment\n\ndt = 0.01  # trailing\nflow_enabled = yes\n")
        assert params.dt == 0.01
        assert params.flow_enabled is True

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            parse_param_text("dt = -1")
        with pytest.raises(ValueError):
            parse_param_text("suction_reduction = 1.5")
