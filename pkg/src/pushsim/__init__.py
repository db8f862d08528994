"""Deterministic 2D contact-pushing simulator and benchmark harness."""

from pushsim.params import SimParams
from pushsim.world import Body, BodyKind, Observation, SceneConfig, WorldState, reset
from pushsim.engine import ActuationCommand, step

__all__ = [
    "ActuationCommand",
    "Body",
    "BodyKind",
    "Observation",
    "SceneConfig",
    "SimParams",
    "WorldState",
    "reset",
    "step",
]

__version__ = "0.1.0"
