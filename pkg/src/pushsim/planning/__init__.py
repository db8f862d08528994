from pushsim.planning.api import PlannerFailure, PlanRequest, plan_debug, plan_path
from pushsim.planning.occupancy import (
    ObstacleCircle,
    extract_obstacles,
    min_enclosing_circle,
    rasterize,
)
from pushsim.planning.polyline import (
    path_length,
    point_polyline_distance,
    polyline_min_clearance,
    resample,
    turning_angle,
)

__all__ = [
    "ObstacleCircle",
    "PlanRequest",
    "PlannerFailure",
    "extract_obstacles",
    "min_enclosing_circle",
    "path_length",
    "plan_debug",
    "plan_path",
    "point_polyline_distance",
    "polyline_min_clearance",
    "rasterize",
    "resample",
    "turning_angle",
]
