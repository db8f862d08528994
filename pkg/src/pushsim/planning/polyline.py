"""Polyline utilities shared by planners, controllers and metrics.

A polyline is a float64 array of shape (n, 2) in pixel space with n >= 2.
"""

import numpy as np

_ARC_EPS = 1e-9


def as_polyline(vertices) -> np.ndarray:
    pts = np.asarray(vertices, dtype=np.float64).reshape(-1, 2)
    if len(pts) < 2:
        raise ValueError("a polyline needs at least 2 vertices")
    if not np.all(np.isfinite(pts)):
        raise ValueError("polyline vertices must be finite")
    return pts


def _segment_lengths(pts: np.ndarray) -> np.ndarray:
    return np.hypot(*(pts[1:] - pts[:-1]).T)


def path_length(polyline) -> float:
    """Euclidean arc length."""
    return float(_segment_lengths(as_polyline(polyline)).sum())


def turning_angle(polyline) -> float:
    """Sum of absolute heading changes at interior vertices, in rad."""
    pts = as_polyline(polyline)
    seg = pts[1:] - pts[:-1]
    keep = np.hypot(seg[:, 0], seg[:, 1]) > 0.0
    seg = seg[keep]
    if len(seg) < 2:
        return 0.0
    headings = np.arctan2(seg[:, 1], seg[:, 0])
    d = np.diff(headings)
    d = (d + np.pi) % (2.0 * np.pi) - np.pi
    return float(np.abs(d).sum())


def resample(polyline, spacing: float) -> np.ndarray:
    """Insert vertices at arc-length multiples of `spacing`.

    Original vertices (corners included) are preserved, so the geometry and
    total length are unchanged and the operation is idempotent; afterwards no
    two consecutive vertices are more than `spacing` apart.
    """
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    pts = as_polyline(polyline)
    seg_len = _segment_lengths(pts)
    arcs = np.concatenate([[0.0], np.cumsum(seg_len)])
    total = arcs[-1]

    targets = []
    k = 1
    while k * spacing < total - _ARC_EPS:
        targets.append(k * spacing)
        k += 1

    out = [pts[0]]
    ti = 0
    for i in range(1, len(pts)):
        lo, hi = arcs[i - 1], arcs[i]
        while ti < len(targets) and targets[ti] < hi - _ARC_EPS:
            s = targets[ti]
            ti += 1
            if s <= lo + _ARC_EPS:
                continue  # coincides with the vertex already emitted
            frac = (s - lo) / (hi - lo)
            out.append(pts[i - 1] + frac * (pts[i] - pts[i - 1]))
        if hi - lo > 0.0 or i == len(pts) - 1:
            if ti < len(targets) and abs(targets[ti] - hi) <= _ARC_EPS:
                ti += 1
            out.append(pts[i])
    return np.asarray(out)


def point_segment_distance(point, a, b) -> float:
    point = np.asarray(point, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(point - a))
    t = float((point - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(point - (a + t * ab)))


def point_polyline_distance(point, polyline) -> float:
    """Exact distance from a point to the nearest polyline segment."""
    pts = as_polyline(polyline)
    a = pts[:-1]
    b = pts[1:]
    p = np.asarray(point, dtype=float)
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    ap = p[None, :] - a
    t = np.zeros(len(a))
    ok = denom > 0.0
    t[ok] = np.einsum("ij,ij->i", ap[ok], ab[ok]) / denom[ok]
    np.clip(t, 0.0, 1.0, out=t)
    closest = a + t[:, None] * ab
    return float(np.min(np.hypot(*(p[None, :] - closest).T)))


def segment_circle_clearance(a, b, center, radius: float) -> float:
    """Signed clearance of segment ab to an inflated circle (>= 0 means clear)."""
    return point_segment_distance(center, a, b) - radius


def polyline_min_clearance(polyline, circles) -> float:
    """Min signed clearance of any segment to any inflated circle.

    `circles` is an iterable of objects with .center and .inflated_radius.
    Returns +inf when there are no circles.
    """
    pts = as_polyline(polyline)
    best = np.inf
    for circle in circles:
        for i in range(len(pts) - 1):
            c = segment_circle_clearance(pts[i], pts[i + 1], circle.center,
                                          circle.inflated_radius)
            if c < best:
                best = c
    return float(best)
