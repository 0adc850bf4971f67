"""Robot description: link geometry, masses, joint limits, feet, configuration mode.

The default model is the 7-link chain used throughout: terminal links are
112 mm, interior links 75 mm, and four of the interior links are mounted with
a 90 deg roll offset so that the actuation planes alternate along the body.
Angles at this boundary are degrees; lengths mm; masses grams.

A ``RobotModel`` is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace

from . import _geom

LINK_COUNT = 7

# Per-link lengths and mounting roll offsets of the default chain.
DEFAULT_LINK_LENGTHS_MM = (112.0, 75.0, 75.0, 75.0, 75.0, 75.0, 112.0)
DEFAULT_THETA_OFFSETS_DEG = (0.0, 0.0, 90.0, 90.0, 90.0, 90.0, 0.0)

DEFAULT_JOINT_LIMIT_DEG = 90.0

# Mechanism mass is 3.21% of the total robot mass (43 g), lumped at the
# center link; the remaining mass is spread proportionally to link length.
TOTAL_MASS_G = 1339.6
MECHANISM_MASS_G = 43.0

# Rectangular foot contact patch (mm, in the foot frame, centered on the
# contact point). Calibrated together with the biped gait so the walk becomes
# unstable just past a 20 deg lift.
DEFAULT_FOOT_HALF_LENGTH_MM = 20.0
DEFAULT_FOOT_HALF_WIDTH_MM = 15.0


class ValidationError(ValueError):
    """A model or config violates one of its invariants."""


class ParseError(ValueError):
    """Config text could not be parsed."""


class ConfigurationMode(enum.Enum):
    SNAKE = "snake"
    BIPED = "biped"
    QUADRUPED_HALF = "quadruped_half"
    QUADRUPED = "quadruped"  # valid only for an engaged pair of agents


@dataclass(frozen=True)
class DHRow:
    """One link of the chain: d/a in mm, theta_offset/alpha in degrees.

    ``theta_offset`` is the structural roll of the link mount about the chain
    axis (0 or 90 for this robot); it selects the joint's actuation plane and
    does not bend the chain at the zero pose.
    """

    d: float
    theta_offset: float
    a: float
    alpha: float

    def validate(self) -> None:
        if self.a <= 0:
            raise ValidationError(f"link length a must be > 0, got {self.a}")
        if self.d != 0:
            raise ValidationError(f"d must be 0 for this robot, got {self.d}")
        if self.alpha != 0:
            raise ValidationError(f"alpha must be 0 for this robot, got {self.alpha}")
        if self.theta_offset not in (0.0, 90.0):
            raise ValidationError(
                f"theta_offset must be 0 or 90 deg, got {self.theta_offset}"
            )


@dataclass(frozen=True)
class FootGeometry:
    """Convex CCW contact polygon of one foot, in the foot frame (mm)."""

    polygon: tuple[tuple[float, float], ...]

    def validate(self) -> None:
        if len(self.polygon) < 3:
            raise ValidationError("foot polygon needs at least 3 vertices")
        if not _geom.is_convex_ccw(self.polygon):
            raise ValidationError("foot polygon must be convex and counterclockwise")
        if _geom.polygon_area(self.polygon) <= 0:
            raise ValidationError("foot polygon must have positive area")


def default_foot_geometry() -> FootGeometry:
    hl, hw = DEFAULT_FOOT_HALF_LENGTH_MM, DEFAULT_FOOT_HALF_WIDTH_MM
    return FootGeometry(polygon=((-hl, -hw), (hl, -hw), (hl, hw), (-hl, hw)))


def default_link_masses() -> tuple[float, ...]:
    structural = TOTAL_MASS_G - MECHANISM_MASS_G
    total_len = sum(DEFAULT_LINK_LENGTHS_MM)
    return tuple(structural * a / total_len for a in DEFAULT_LINK_LENGTHS_MM)


@dataclass(frozen=True)
class RobotModel:
    """Immutable description of one agent."""

    dh: tuple[DHRow, ...]
    joint_limits: tuple[tuple[float, float], ...]
    link_masses: tuple[float, ...]
    mechanism_mass_g: float
    foot: FootGeometry
    mode: ConfigurationMode = ConfigurationMode.SNAKE

    def validate(self) -> None:
        if len(self.dh) != LINK_COUNT:
            raise ValidationError(f"expected 7 links, got {len(self.dh)}")
        for row in self.dh:
            row.validate()
        if len(self.joint_limits) != LINK_COUNT:
            raise ValidationError(
                f"expected 7 joint limit pairs, got {len(self.joint_limits)}"
            )
        for i, (lo, hi) in enumerate(self.joint_limits):
            if not lo < hi:
                raise ValidationError(f"joint {i} limits must satisfy min < max")
        if len(self.link_masses) != LINK_COUNT:
            raise ValidationError(
                f"expected 7 link masses, got {len(self.link_masses)}"
            )
        for i, m in enumerate(self.link_masses):
            if m < 0:
                raise ValidationError(f"link {i} mass must be >= 0, got {m}")
        if sum(self.link_masses) <= 0:
            raise ValidationError("total link mass must be positive")
        if self.mechanism_mass_g < 0:
            raise ValidationError("mechanism mass must be >= 0")
        self.foot.validate()
        if self.mode is ConfigurationMode.QUADRUPED:
            raise ValidationError(
                "quadruped mode requires an engaged pair of agents, not a single model"
            )

    @property
    def link_lengths(self) -> tuple[float, ...]:
        return tuple(row.a for row in self.dh)

    def with_mode(self, mode: ConfigurationMode) -> "RobotModel":
        return replace(self, mode=mode)


def default_model(mode: ConfigurationMode = ConfigurationMode.SNAKE) -> RobotModel:
    model = RobotModel(
        dh=tuple(
            DHRow(d=0.0, theta_offset=off, a=a, alpha=0.0)
            for a, off in zip(DEFAULT_LINK_LENGTHS_MM, DEFAULT_THETA_OFFSETS_DEG)
        ),
        joint_limits=((-DEFAULT_JOINT_LIMIT_DEG, DEFAULT_JOINT_LIMIT_DEG),) * LINK_COUNT,
        link_masses=default_link_masses(),
        mechanism_mass_g=MECHANISM_MASS_G,
        foot=default_foot_geometry(),
        mode=mode,
    )
    model.validate()
    return model


def total_mass(model: RobotModel) -> float:
    """Total agent mass in grams: link masses plus the docking mechanism."""
    return sum(model.link_masses) + model.mechanism_mass_g


def load_model(config_text: str) -> RobotModel:
    """Build a validated RobotModel from JSON config text.

    Missing keys take the defaults; an empty object reproduces the default
    model exactly. Raises ParseError for malformed text and ValidationError
    naming the violated invariant otherwise.
    """
    try:
        raw = json.loads(config_text) if config_text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ParseError(f"model config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("model config must be a JSON object")

    known = {"dh", "joint_limits", "link_masses", "foot_polygon", "mechanism_mass_g", "mode"}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")

    base = default_model()
    try:
        dh = base.dh
        if "dh" in raw:
            dh = tuple(
                DHRow(
                    d=float(r.get("d", 0.0)),
                    theta_offset=float(r.get("theta_offset", 0.0)),
                    a=float(r["a"]),
                    alpha=float(r.get("alpha", 0.0)),
                )
                for r in raw["dh"]
            )
        limits = base.joint_limits
        if "joint_limits" in raw:
            limits = tuple((float(lo), float(hi)) for lo, hi in raw["joint_limits"])
        masses = base.link_masses
        if "link_masses" in raw:
            masses = tuple(float(m) for m in raw["link_masses"])
        foot = base.foot
        if "foot_polygon" in raw:
            foot = FootGeometry(tuple((float(x), float(y)) for x, y in raw["foot_polygon"]))
        mech = float(raw.get("mechanism_mass_g", base.mechanism_mass_g))
        mode = ConfigurationMode(raw.get("mode", base.mode.value))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ParseError(f"malformed model config field: {exc}") from exc

    model = RobotModel(
        dh=dh,
        joint_limits=limits,
        link_masses=masses,
        mechanism_mass_g=mech,
        foot=foot,
        mode=mode,
    )
    model.validate()
    return model


def serialize_model(model: RobotModel) -> str:
    """JSON text that load_model() round-trips to an equal model."""
    doc = {
        "dh": [
            {"d": r.d, "theta_offset": r.theta_offset, "a": r.a, "alpha": r.alpha}
            for r in model.dh
        ],
        "joint_limits": [list(pair) for pair in model.joint_limits],
        "link_masses": list(model.link_masses),
        "foot_polygon": [list(p) for p in model.foot.polygon],
        "mechanism_mass_g": model.mechanism_mass_g,
        "mode": model.mode.value,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_model_file(path: str) -> RobotModel:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read())
