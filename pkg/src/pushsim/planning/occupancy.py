"""Occupancy rasterization and circular obstacle extraction.

The workspace is rasterized at 1 px per grid cell; cell (ix, iy) covers the
unit square [ix, ix+1) x [iy, iy+1) and is painted when its center falls
inside a body disk. Obstacles are recovered as connected components whose
contour corners are summarized by an exact minimum enclosing circle, then
inflated by the moving body's radius so planning can treat the mover as a
point.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class ObstacleCircle:
    center: np.ndarray        # (2,) [px]
    radius: float             # recovered obstacle radius [px]
    inflated_radius: float    # radius + r_move [px]


def mask_shape(width: float, height: float) -> tuple[int, int]:
    return int(np.ceil(height)), int(np.ceil(width))


def rasterize(positions, radii, width: float, height: float,
              exclude: set[int] | frozenset[int] = frozenset()) -> np.ndarray:
    """Binary occupancy mask of shape (H, W); excluded body indices leave free space."""
    h, w = mask_shape(width, height)
    mask = np.zeros((h, w), dtype=bool)
    xs = np.arange(w) + 0.5
    ys = np.arange(h) + 0.5
    for idx, (p, r) in enumerate(zip(np.asarray(positions), np.asarray(radii))):
        if idx in exclude:
            continue
        x0 = max(0, int(p[0] - r) - 1)
        x1 = min(w, int(p[0] + r) + 2)
        y0 = max(0, int(p[1] - r) - 1)
        y1 = min(h, int(p[1] + r) + 2)
        if x0 >= x1 or y0 >= y1:
            continue
        dx = xs[x0:x1] - p[0]
        dy = ys[y0:y1] - p[1]
        disk = dx[None, :] ** 2 + dy[:, None] ** 2 <= r * r
        mask[y0:y1, x0:x1] |= disk
    return mask


_MEC_SHUFFLER = np.random.Generator(np.random.Philox(np.random.SeedSequence(0x5EC)))


def _circumcircle(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if d == 0.0:
        return None
    a2, b2, c2 = a @ a, b @ b, c @ c
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    center = np.array([ux, uy])
    return center, float(np.linalg.norm(a - center))


def min_enclosing_circle(points) -> tuple[np.ndarray, float]:
    """Exact smallest enclosing circle (Welzl, move-to-front) of >= 1 points."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("need at least one point")
    order = _MEC_SHUFFLER.permutation(len(pts))
    pts = pts[order]

    def contains(center, radius, p, eps=1e-9):
        return np.linalg.norm(p - center) <= radius + eps

    center, radius = pts[0].copy(), 0.0
    for i in range(1, len(pts)):
        if contains(center, radius, pts[i]):
            continue
        center, radius = pts[i].copy(), 0.0
        for j in range(i):
            if contains(center, radius, pts[j]):
                continue
            center = 0.5 * (pts[i] + pts[j])
            radius = float(np.linalg.norm(pts[i] - center))
            for k in range(j):
                if contains(center, radius, pts[k]):
                    continue
                circ = _circumcircle(pts[i], pts[j], pts[k])
                if circ is not None:
                    center, radius = circ
    return center, radius


_CONN8 = np.ones((3, 3), dtype=int)


def extract_obstacles(mask: np.ndarray, r_move: float) -> list[ObstacleCircle]:
    """Connected components (8-connectivity) of occupied pixels, each summarized
    by the minimum enclosing circle of its contour-pixel corners."""
    labels, count = ndimage.label(mask, structure=_CONN8)
    if count == 0:
        return []
    interior = ndimage.binary_erosion(mask)
    contour = mask & ~interior
    obstacles = []
    for lab in range(1, count + 1):
        component = labels == lab
        edge = component & contour
        if not edge.any():
            edge = component
        ys, xs = np.nonzero(edge)
        corners = np.concatenate([
            np.stack([xs, ys], axis=1),
            np.stack([xs + 1, ys], axis=1),
            np.stack([xs, ys + 1], axis=1),
            np.stack([xs + 1, ys + 1], axis=1),
        ]).astype(float)
        center, radius = min_enclosing_circle(np.unique(corners, axis=0))
        obstacles.append(ObstacleCircle(center, radius, radius + r_move))
    return obstacles
