from pushsim.control.controller import (
    ControllerOutput,
    PushController,
    limit_command,
    to_actuation,
)
from pushsim.control.mpc import MpcError, mpc_solve, mpc_solve_horizon
from pushsim.control.params import ControlParams, MpcParams, PidParams
from pushsim.control.pid import PidState, pid_update
from pushsim.control.reference import ReferencePhase, ReferenceState, reference_point

__all__ = [
    "ControlParams",
    "ControllerOutput",
    "MpcError",
    "MpcParams",
    "PidParams",
    "PidState",
    "PushController",
    "ReferencePhase",
    "ReferenceState",
    "limit_command",
    "mpc_solve",
    "mpc_solve_horizon",
    "pid_update",
    "reference_point",
    "to_actuation",
]
