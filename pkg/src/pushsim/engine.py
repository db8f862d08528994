"""Fixed-timestep overdamped stepping pipeline.

Per step: noisy actuation -> wall + contact forces -> provisional velocities
-> pair velocity corrections (friction, approach cap, guard band, near-field
damping, in that order, each stage reading the velocities the previous stage
left) -> background flow -> explicit Euler -> position-level overlap
projection. Everything is float64 and order-deterministic, so a fixed
(seed, command sequence) reproduces trajectories bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

from pushsim.params import SimParams
from pushsim.world import Observation, WorldState

MAX_PROJECTION_SWEEPS = 256


class CommandError(ValueError):
    """Actuation command outside the admissible range; state unchanged."""


class DegenerateContactError(ValueError):
    """Coincident disk centers: the contact normal is undefined."""


def normalize_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


@dataclass(frozen=True)
class ActuationCommand:
    frequency_hz: float
    heading_rad: float

    def __post_init__(self):
        if math.isfinite(self.heading_rad):
            object.__setattr__(self, "heading_rad", normalize_angle(self.heading_rad))

    def validate(self, params: SimParams) -> None:
        if not math.isfinite(self.frequency_hz) or not 0.0 <= self.frequency_hz <= params.max_freq_hz:
            raise CommandError(
                f"frequency {self.frequency_hz} Hz outside [0, {params.max_freq_hz}]")
        if not math.isfinite(self.heading_rad):
            raise CommandError(f"heading {self.heading_rad} is not finite")


def calibrated_speed(freq_hz: float, params: SimParams) -> float:
    """Free-space rolling speed for a drive frequency, in um/s (through-origin fit)."""
    if not 0.0 <= freq_hz <= params.max_freq_hz:
        raise CommandError(f"frequency {freq_hz} Hz outside [0, {params.max_freq_hz}]")
    return params.speed_per_hz * freq_hz


def apply_actuation_noise(cmd: ActuationCommand, rng: np.random.Generator,
                          params: SimParams) -> np.ndarray:
    """Perturbed drive velocity in px/s.

    Draws exactly two uniforms (speed factor, then heading offset) so the
    stream advances identically whether or not the noise bounds are zero.
    """
    speed_factor = rng.uniform(1.0 - params.noise_speed_frac, 1.0 + params.noise_speed_frac)
    heading_offset = rng.uniform(-params.noise_heading_rad, params.noise_heading_rad)
    speed_px = calibrated_speed(cmd.frequency_hz, params) / params.um_per_px
    speed = speed_px * speed_factor
    theta = cmd.heading_rad + heading_offset
    return np.array([speed * math.cos(theta), speed * math.sin(theta)])


def wall_force(position: np.ndarray, radius: float, params: SimParams) -> np.ndarray:
    """Boundary penalty force; zero while the disk is fully inside."""
    x, y = position
    k = params.wall_stiffness
    fx = k * (max(0.0, radius - x) - max(0.0, x - (params.width - radius)))
    fy = k * (max(0.0, radius - y) - max(0.0, y - (params.height - radius)))
    return np.array([fx, fy])


def hertz_normal(d_ij: float, r_i: float, r_j: float, stiffness: float,
                 p_i: np.ndarray, p_j: np.ndarray) -> tuple[float, np.ndarray]:
    """Hertz-type normal magnitude and unit normal from i toward j."""
    if d_ij == 0.0:
        raise DegenerateContactError("coincident centers")
    overlap = (r_i + r_j) - d_ij
    magnitude = stiffness * overlap ** 1.5 if overlap > 0.0 else 0.0
    normal = (p_j - p_i) / d_ij
    return magnitude, normal


def friction_correction(v_rel: np.ndarray, normal: np.ndarray, f_normal: float,
                        drag_inv_i: float, drag_inv_j: float, friction_coeff: float,
                        dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Stick-slip tangential velocity adjustments for bodies i and j.

    The tangential relative component is cancelled outright when it fits in
    the per-step budget mu*F_n*(1/gamma_i + 1/gamma_j)*dt, otherwise reduced
    by exactly the budget. The correction splits between the pair in
    proportion to each body's mobility.
    """
    tangent = np.array([-normal[1], normal[0]])
    v_t = float(v_rel @ tangent)
    budget = friction_coeff * f_normal * (drag_inv_i + drag_inv_j) * dt
    if abs(v_t) <= budget:
        dv_rel = -v_t
    else:
        dv_rel = -math.copysign(budget, v_t)
    total = drag_inv_i + drag_inv_j
    dv_i = (drag_inv_i / total) * dv_rel * tangent
    dv_j = -(drag_inv_j / total) * dv_rel * tangent
    return dv_i, dv_j


def near_field_damping(gap: float, gap_rate: float, params: SimParams) -> float:
    """Reduced separation rate inside the near-field threshold; pass-through otherwise."""
    if gap_rate <= 0.0 or gap <= 0.0:
        return gap_rate
    threshold = min(max(params.suction_base_gap + params.suction_rate_slope * max(0.0, gap_rate),
                        params.suction_base_gap), params.suction_max_gap)
    if gap <= threshold:
        return (1.0 - params.suction_reduction) * gap_rate
    return gap_rate


def guard_band_clamp(gap: float, v_normal_closing: float, guard_gap: float) -> float:
    """Zero the closing normal relative velocity inside the guard gap."""
    if 0.0 < gap <= guard_gap and v_normal_closing > 0.0:
        return 0.0
    return v_normal_closing


def flow_velocity(y: float, params: SimParams) -> np.ndarray:
    """Poiseuille drift along +x at height y, in px/s."""
    xi = 2.0 * (y / params.height) - 1.0
    vx = params.flow_peak_um_s * (1.0 - xi * xi) / params.um_per_px
    return np.array([vx, 0.0])


def _pair_geometry(world: WorldState):
    """d, normal, overlap, gap for every i<j pair; degenerate pairs get a
    seeded random normal and bump the warning counter."""
    i_idx, j_idx = world.pair_indices()
    diff = world.positions[j_idx] - world.positions[i_idx]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    sum_r = world.radii[i_idx] + world.radii[j_idx]
    normals = np.zeros_like(diff)
    ok = dist > 0.0
    normals[ok] = diff[ok] / dist[ok, None]
    for k in np.flatnonzero(~ok):
        ang = world.contact_rng.uniform(0.0, 2.0 * math.pi)
        normals[k] = (math.cos(ang), math.sin(ang))
        world.degenerate_contacts += 1
    overlap = sum_r - dist
    gap = -overlap
    return i_idx, j_idx, dist, normals, overlap, gap


def _apply_pair_corrections(world: WorldState, v: np.ndarray, i_idx, j_idx,
                            normals, overlap, gap, f_normal) -> None:
    params = world.params
    g = world.drag_inverse
    near = (gap < params.suction_max_gap + params.guard_gap) | (overlap > 0.0)
    active = np.flatnonzero(near)
    if active.size == 0:
        return

    def split(k, dv_rel_scalar, direction):
        i, j = i_idx[k], j_idx[k]
        total = g[i] + g[j]
        v[i] += (g[i] / total) * dv_rel_scalar * direction
        v[j] -= (g[j] / total) * dv_rel_scalar * direction

    # stage 1: stick-slip friction on overlapping pairs
    for k in active:
        if overlap[k] <= 0.0:
            continue
        i, j = i_idx[k], j_idx[k]
        dv_i, dv_j = friction_correction(v[i] - v[j], normals[k], f_normal[k],
                                         g[i], g[j], params.friction_coeff, params.dt)
        v[i] += dv_i
        v[j] += dv_j

    # stage 2: cap the normal approach rate of overlapping pairs
    for k in active:
        if overlap[k] <= 0.0:
            continue
        i, j = i_idx[k], j_idx[k]
        cap = params.approach_cap_scale * (world.radii[i] + world.radii[j]) / params.dt
        v_n = float((v[i] - v[j]) @ normals[k])
        if v_n > cap:
            split(k, cap - v_n, normals[k])

    # stage 3: guard band zeroes imminent-contact closing motion
    for k in active:
        i, j = i_idx[k], j_idx[k]
        v_n = float((v[i] - v[j]) @ normals[k])
        clamped = guard_band_clamp(gap[k], v_n, params.guard_gap)
        if clamped != v_n:
            split(k, clamped - v_n, normals[k])

    # stage 4: near-field damping of the separation rate
    for k in active:
        i, j = i_idx[k], j_idx[k]
        if not params.suction_all_pairs and i != 0:
            continue
        v_n = float((v[i] - v[j]) @ normals[k])
        rate = -v_n
        damped = near_field_damping(gap[k], rate, params)
        if damped != rate:
            split(k, rate - damped, normals[k])


def resolve_overlaps(world: WorldState) -> None:
    """Position-level projection: separate penetrating pairs along their
    normals (split by mobility) and keep bodies inside the workspace, sweeping
    until the residual overlap falls under the tolerance."""
    params = world.params
    tol = params.overlap_tolerance
    pos = world.positions
    radii = world.radii
    g = world.drag_inverse
    i_all, j_all = world.pair_indices()
    for _ in range(MAX_PROJECTION_SWEEPS):
        diff = pos[j_all] - pos[i_all]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        overlap = (radii[i_all] + radii[j_all]) - dist
        worst = overlap.max(initial=0.0)
        if worst <= tol:
            lo = radii
            hi_x = params.width - radii
            hi_y = params.height - radii
            clamped_x = np.clip(pos[:, 0], lo, hi_x)
            clamped_y = np.clip(pos[:, 1], lo, hi_y)
            if np.array_equal(clamped_x, pos[:, 0]) and np.array_equal(clamped_y, pos[:, 1]):
                return
            pos[:, 0] = clamped_x
            pos[:, 1] = clamped_y
            continue
        for k in np.flatnonzero(overlap > tol):
            i, j = i_all[k], j_all[k]
            d = pos[j] - pos[i]
            dist_k = math.hypot(d[0], d[1])
            if dist_k == 0.0:
                ang = world.contact_rng.uniform(0.0, 2.0 * math.pi)
                n = np.array([math.cos(ang), math.sin(ang)])
                world.degenerate_contacts += 1
                delta = radii[i] + radii[j]
            else:
                n = d / dist_k
                delta = (radii[i] + radii[j]) - dist_k
            if delta <= tol:
                continue
            total = g[i] + g[j]
            pos[i] -= (g[i] / total) * delta * n
            pos[j] += (g[j] / total) * delta * n
        np.clip(pos[:, 0], radii, params.width - radii, out=pos[:, 0])
        np.clip(pos[:, 1], radii, params.height - radii, out=pos[:, 1])


def step(world: WorldState, cmd: ActuationCommand) -> Observation:
    """Advance the world by one dt under `cmd` and return the observation."""
    params = world.params
    cmd.validate(params)

    n = world.n_bodies
    u = np.zeros((n, 2))
    u[0] = apply_actuation_noise(cmd, world.noise_rng, params)

    forces = np.empty((n, 2))
    k_w = params.wall_stiffness
    radii = world.radii
    forces[:, 0] = k_w * (np.maximum(0.0, radii - world.positions[:, 0])
                          - np.maximum(0.0, world.positions[:, 0] - (params.width - radii)))
    forces[:, 1] = k_w * (np.maximum(0.0, radii - world.positions[:, 1])
                          - np.maximum(0.0, world.positions[:, 1] - (params.height - radii)))

    i_idx, j_idx, dist, normals, overlap, gap = _pair_geometry(world)
    contact = overlap > 0.0
    f_normal = np.where(contact, params.hertz_stiffness * np.abs(overlap) ** 1.5, 0.0)
    if np.any(contact):
        push = f_normal[contact, None] * normals[contact]
        np.subtract.at(forces, i_idx[contact], push)
        np.add.at(forces, j_idx[contact], push)

    v = u + world.drag_inverse[:, None] * forces
    _apply_pair_corrections(world, v, i_idx, j_idx, normals, overlap, gap, f_normal)

    if params.flow_enabled:
        xi = 2.0 * (world.positions[:, 1] / params.height) - 1.0
        v[:, 0] += params.flow_peak_um_s * (1.0 - xi * xi) / params.um_per_px

    world.positions += v * params.dt
    world.velocities = v
    resolve_overlaps(world)

    world.time += params.dt
    world.step_count += 1
    return world.observe()
