"""Controller parameter records."""

from dataclasses import dataclass, field

from pushsim.params import SimParams


@dataclass(frozen=True)
class MpcParams:
    horizon: int = 10
    q_pos: float = 3.0
    r_ctl: float = 0.12
    s_smooth: float = 0.05
    qf_scale: float = 6.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass(frozen=True)
class PidParams:
    kp: float = 4.0
    ki: float = 0.0
    kd: float = 0.8
    derivative_filter: float = 0.4   # low-pass coefficient in (0, 1]
    integral_clamp: float = 50.0     # element-wise bound on the accumulated error [px*s]

    def __post_init__(self):
        if not 0.0 < self.derivative_filter <= 1.0:
            raise ValueError("derivative_filter must be in (0, 1]")


@dataclass(frozen=True)
class ControlParams:
    speed_limit: float                      # |u| bound [px/s]
    rate_limit: float                       # |u - u_prev| bound per step [px/s]
    pre_contact_clearance: float = 0.8      # gap behind the cell before contact [px]
    contact_tolerance: float = 1.0          # contact detection slack [px]; must exceed
                                            # pre_contact_clearance or the reference
                                            # machine stalls at the pre-contact point
    keep_factor: float = 0.2                # compression-limiting offset fraction in (0,1)
    transition_steps: int = 10
    alignment_threshold: float = 0.35       # heading-to-push-direction tolerance [rad]
    revert_steps: int = 15                  # pre-contact hysteresis on abrupt direction flips
    near_zero_speed: float = 1e-6           # below this the previous heading is held [px/s]
    mpc: MpcParams = field(default_factory=MpcParams)
    pid: PidParams = field(default_factory=PidParams)

    def __post_init__(self):
        if self.speed_limit <= 0 or self.rate_limit <= 0:
            raise ValueError("speed and rate limits must be > 0")
        if not 0.0 < self.keep_factor < 1.0:
            raise ValueError("keep_factor must be in (0, 1)")

    @classmethod
    def from_sim(cls, sim: SimParams, **overrides) -> "ControlParams":
        """Derive the speed limit from the actuation calibration and the rate
        limit as 0.8 of it."""
        v_max = sim.max_speed_px_s
        defaults = {"speed_limit": v_max, "rate_limit": 0.8 * v_max}
        defaults.update(overrides)
        return cls(**defaults)
