"""Seed-deterministic scene and goal generation with feasibility checks."""

from dataclasses import dataclass

import numpy as np

from pushsim.assembly import HexSpec, default_hex_radius, hex_vertices
from pushsim.bench.config import EpisodeConfig, TaskKind
from pushsim.world import SceneConfig, SceneError, WorldState, reset

ROBOT_BOX_FRACTION = 0.15   # robot starts uniformly in the top-left box
GOAL_FRACTION = 0.85        # transport goal is fixed near the bottom-right
DEFAULT_CELL_COUNT = 20     # single cell for flow-on transport
MAX_LAYOUT_ATTEMPTS = 200


class ScenarioError(RuntimeError):
    """No feasible layout within the attempt budget; the episode is skipped."""


@dataclass(frozen=True)
class Scenario:
    world: WorldState
    task: TaskKind
    goal: np.ndarray | None = None           # transport target [px]
    selected_cell: int | None = None         # transport pushed cell id
    hex_spec: HexSpec | None = None          # assembly pattern

    @property
    def vertices(self) -> np.ndarray | None:
        return None if self.hex_spec is None else hex_vertices(self.hex_spec)


def _scene_config(config: EpisodeConfig) -> SceneConfig:
    params = config.sim_params
    n_cells = 1 if (config.task is TaskKind.TRANSPORT and config.flow_on) \
        else DEFAULT_CELL_COUNT
    box = (0.0, 0.0, ROBOT_BOX_FRACTION * params.width, ROBOT_BOX_FRACTION * params.height)
    return SceneConfig(n_cells=n_cells, robot_box=box)


def _clear_of_all_cells(point: np.ndarray, world: WorldState, exclusion: float) -> bool:
    cells = world.positions[1:]
    if len(cells) == 0:
        return True
    return bool(np.all(np.linalg.norm(cells - point, axis=1) > exclusion))


def generate_scenario(config: EpisodeConfig) -> Scenario:
    """Layouts are redrawn (deterministically, per attempt substream) until the
    task's goal geometry is clear of every cell's inflated exclusion region."""
    params = config.sim_params
    scene = _scene_config(config)
    cell_radius = scene.cell_radius_px(params)
    exclusion = 2.0 * cell_radius  # a cell must be able to sit on the target

    if config.task is TaskKind.TRANSPORT:
        goal = np.array([GOAL_FRACTION * params.width, GOAL_FRACTION * params.height])
        for attempt in range(MAX_LAYOUT_ATTEMPTS):
            salt = None if attempt == 0 else attempt
            try:
                world = reset(scene, config.seed, params, layout_salt=salt)
            except SceneError as exc:
                raise ScenarioError(str(exc)) from exc
            if not _clear_of_all_cells(goal, world, exclusion):
                continue
            midpoint = 0.5 * (world.positions[0] + goal)
            dists = np.linalg.norm(world.positions[1:] - midpoint, axis=1)
            selected = 1 + int(np.argmin(dists))
            return Scenario(world, config.task, goal=goal, selected_cell=selected)
        raise ScenarioError(
            f"no feasible transport layout for seed {config.seed} "
            f"in {MAX_LAYOUT_ATTEMPTS} attempts")

    spec = HexSpec(np.array([params.width / 2.0, params.height / 2.0]),
                   default_hex_radius(cell_radius))
    targets = np.vstack([spec.center[None, :], hex_vertices(spec)])
    for attempt in range(MAX_LAYOUT_ATTEMPTS):
        salt = None if attempt == 0 else attempt
        try:
            world = reset(scene, config.seed, params, layout_salt=salt)
        except SceneError as exc:
            raise ScenarioError(str(exc)) from exc
        if all(_clear_of_all_cells(t, world, exclusion) for t in targets):
            return Scenario(world, config.task, hex_spec=spec)
    raise ScenarioError(
        f"no feasible assembly layout for seed {config.seed} "
        f"in {MAX_LAYOUT_ATTEMPTS} attempts")
