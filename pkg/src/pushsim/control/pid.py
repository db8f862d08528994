"""PID velocity law with clamped integral and low-pass filtered derivative."""

from dataclasses import dataclass

import numpy as np

from pushsim.control.params import PidParams


@dataclass(frozen=True)
class PidState:
    integral: tuple[float, float] = (0.0, 0.0)
    e_prev: tuple[float, float] | None = None   # None until the first update (bumpless start)
    deriv_f: tuple[float, float] = (0.0, 0.0)


def pid_update(error: np.ndarray, state: PidState, dt: float,
               params: PidParams) -> tuple[np.ndarray, PidState]:
    """Velocity command for the current error and the advanced state."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    e = np.asarray(error, dtype=float)
    e_prev = e if state.e_prev is None else np.asarray(state.e_prev)
    integral = np.clip(np.asarray(state.integral) + e * dt,
                       -params.integral_clamp, params.integral_clamp)
    deriv_raw = (e - e_prev) / dt
    deriv_f = (1.0 - params.derivative_filter) * np.asarray(state.deriv_f) \
        + params.derivative_filter * deriv_raw
    u = params.kp * e + params.ki * integral + params.kd * deriv_f
    new_state = PidState(integral=(float(integral[0]), float(integral[1])),
                         e_prev=(float(e[0]), float(e[1])),
                         deriv_f=(float(deriv_f[0]), float(deriv_f[1])))
    return u, new_state
