"""Receding-horizon velocity regulation as an exact unconstrained QP.

Single-integrator dynamics x_{k+1} = x_k + dt*u_k with stage cost
q|x_k - p|^2 + r|u_k|^2, terminal cost qf*q|x_N - p|^2 and a first-move
smoothness penalty s|u_0 - u_prev|^2. With scalar weights the two axes
decouple into identical tridiagonal-free dense solves of size N, done
analytically (no iterative solver, hence no nondeterminism). Speed and rate
limits are applied afterwards by the caller.
"""

import numpy as np

from pushsim.control.params import MpcParams


class MpcError(RuntimeError):
    """The horizon problem is singular (degenerate weights)."""


def _horizon_matrices(params: MpcParams, dt: float):
    n = params.horizon
    # state k (k=1..N) is e0 + dt * sum_{j<k} u_j; A maps u to the state offsets
    a = np.tril(np.full((n, n), dt))
    weights = np.full(n, params.q_pos)
    weights[-1] = params.qf_scale * params.q_pos
    h = a.T @ (weights[:, None] * a) + params.r_ctl * np.eye(n)
    h[0, 0] += params.s_smooth
    return a, weights, h


def mpc_solve_horizon(x: np.ndarray, p_ref: np.ndarray, u_prev: np.ndarray,
                      params: MpcParams, dt: float) -> np.ndarray:
    """Full optimal control sequence, shape (N, 2)."""
    x = np.asarray(x, dtype=float)
    p_ref = np.asarray(p_ref, dtype=float)
    u_prev = np.asarray(u_prev, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(p_ref))
            and np.all(np.isfinite(u_prev))):
        raise MpcError("non-finite inputs")
    a, weights, h = _horizon_matrices(params, dt)
    e0 = x - p_ref                       # (2,)
    rhs = -np.outer(a.T @ weights, e0)   # (N, 2)
    rhs[0] += params.s_smooth * u_prev
    try:
        u = np.linalg.solve(h, rhs)
    except np.linalg.LinAlgError as exc:
        raise MpcError(str(exc)) from exc
    if not np.all(np.isfinite(u)):
        raise MpcError("singular horizon problem")
    return u


def mpc_solve(x: np.ndarray, p_ref: np.ndarray, u_prev: np.ndarray,
              params: MpcParams, dt: float) -> np.ndarray:
    """First action of the receding-horizon solution."""
    return mpc_solve_horizon(x, p_ref, u_prev, params, dt)[0]
