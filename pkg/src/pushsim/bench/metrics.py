"""Episode metrics and the binomial confidence interval."""

import math

import numpy as np

from pushsim.planning.polyline import point_polyline_distance


def tracking_error_um(cell_points, polyline, um_per_px: float) -> float:
    """Mean exact point-to-polyline distance over push-stage samples, in um."""
    pts = np.asarray(cell_points, dtype=float)
    if len(pts) == 0:
        return 0.0
    total = sum(point_polyline_distance(p, polyline) for p in pts)
    return total / len(pts) * um_per_px


def arc_length_um(points, um_per_px: float) -> float:
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return 0.0
    return float(np.hypot(*np.diff(pts, axis=0).T).sum()) * um_per_px


def actuation_variation(freqs) -> float:
    """Total variation of the commanded frequency sequence [Hz]."""
    f = np.asarray(freqs, dtype=float)
    if len(f) < 2:
        return 0.0
    return float(np.abs(np.diff(f)).sum())


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial success rate."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if not 0 <= successes <= trials:
        raise ValueError("successes must be in [0, trials]")
    p = successes / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (p + z2n / 2.0) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)
