"""Simulator parameter set and its human-readable key/value file format.

Every physical and numerical constant lives here so runs are auditable from
one record. Fields marked "repo default" have no published value and were
tuned so a 30 Hz push moves a same-size cell without tunneling at dt=0.05.
"""

from dataclasses import dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class SimParams:
    dt: float = 0.05                    # integration step [s]
    um_per_px: float = 1.2              # physical scale [um per px] (240 um / 200 px)
    speed_per_hz: float = 2.3           # calibrated free rolling speed slope [um/s/Hz]
    max_freq_hz: float = 30.0           # command frequency limit (step-out above) [Hz]
    noise_speed_frac: float = 0.02      # uniform speed noise, +-fraction
    noise_heading_rad: float = 0.02     # uniform heading noise, +-rad
    wall_stiffness: float = 200.0       # boundary penalty stiffness (repo default)
    hertz_stiffness: float = 50.0       # contact normal stiffness (repo default)
    friction_coeff: float = 0.3         # tangential stick-slip coefficient (repo default)
    drag_inverse: float = 0.02          # mobility 1/gamma [px/s per force unit] (repo default)
    suction_reduction: float = 0.5      # separation-rate reduction in near field, (0,1) (repo default)
    suction_base_gap: float = 0.5       # near-field base gap threshold [px] (repo default)
    suction_rate_slope: float = 0.05    # gap-threshold growth per unit separation rate [s] (repo default)
    suction_max_gap: float = 2.0        # near-field gap threshold cap [px] (repo default)
    suction_all_pairs: bool = True      # False restricts near-field damping to robot-cell pairs
    guard_gap: float = 0.05             # closing motion zeroed within this gap [px] (repo default)
    approach_cap_scale: float = 0.05    # normal approach cap = scale*(r_i+r_j)/dt (repo default)
    flow_enabled: bool = False
    flow_peak_um_s: float = 5.0         # Poiseuille centerline speed [um/s]
    width: float = 200.0                # workspace [px]
    height: float = 140.0               # workspace [px]
    overlap_tolerance: float = 1e-6     # max residual pairwise overlap after a step [px]

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be > 0")
        if not 0 < self.suction_reduction < 1:
            raise ValueError("suction_reduction must be in (0, 1)")
        if self.suction_base_gap > self.suction_max_gap:
            raise ValueError("suction_base_gap must be <= suction_max_gap")
        for name in ("wall_stiffness", "hertz_stiffness", "friction_coeff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.drag_inverse <= 0:
            raise ValueError("drag_inverse must be > 0")
        if self.um_per_px <= 0 or self.width <= 0 or self.height <= 0:
            raise ValueError("scale and workspace dimensions must be > 0")

    @property
    def max_speed_px_s(self) -> float:
        """Free-space speed at max_freq_hz, in px/s."""
        return self.speed_per_hz * self.max_freq_hz / self.um_per_px

    def with_overrides(self, **kwargs) -> "SimParams":
        return replace(self, **kwargs)


_FIELD_TYPES = {f.name: f.type for f in fields(SimParams)}
_TRUE_WORDS = {"true", "1", "yes", "on"}
_FALSE_WORDS = {"false", "0", "no", "off"}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    if kind == "bool" or kind is bool:
        word = raw.strip().lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
        raise ValueError(f"{key}: expected a boolean, got {raw!r}")
    return float(raw)


def parse_param_text(text: str, base: SimParams | None = None) -> SimParams:
    """Parse "key = value" lines ('#' comments allowed). Unknown keys are rejected."""
    overrides = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, _, raw = line.partition("=")
        elif ":" in line:
            key, _, raw = line.partition(":")
        else:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ValueError(f"line {lineno}: unknown parameter {key!r}")
        overrides[key] = _parse_value(key, raw)
    return (base or SimParams()).with_overrides(**overrides)


def load_param_file(path: str | Path, base: SimParams | None = None) -> SimParams:
    return parse_param_text(Path(path).read_text(encoding="utf-8"), base=base)


def dump_param_text(params: SimParams) -> str:
    lines = [f"{f.name} = {getattr(params, f.name)!r}".replace("'", "") for f in fields(SimParams)]
    return "\n".join(lines) + "\n"
