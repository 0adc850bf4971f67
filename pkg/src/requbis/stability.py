"""Support polygons, signed stability margins, and trajectory validation.

Quasi-static criterion throughout: a pose is stable when the vertical
projection of the center of mass lies inside the convex hull of the ground
contact points. Margin is the signed Euclidean distance to the hull boundary,
positive inside; |margin| < 1e-6 mm counts as stable (boundary inclusive).

Pure geometry; samples of a trajectory may be validated in any order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _geom
from .kinematics import center_of_mass, forward_kinematics
from .model import RobotModel, total_mass
from .trajectory import Contact, ContactSchedule, Trajectory

BOUNDARY_TOL_MM = 1e-6

# Sanity bound for "this contact is actually on the ground" checks.
CONTACT_HEIGHT_TOL_MM = 6.0

LINK_CONTACT_SAMPLES = 5
# Resting links bear on the module's cross-section, not a geometric line.
LINK_CONTACT_HALF_WIDTH_MM = 15.0


class ScheduleMismatchError(ValueError):
    """Contact schedule does not line up with the trajectory."""


@dataclass(frozen=True)
class SupportPolygon:
    """Convex CCW support polygon in the ground plane; mm."""

    vertices: tuple[tuple[float, float], ...]
    degenerate: bool

    @property
    def area(self) -> float:
        if self.degenerate:
            return 0.0
        return _geom.polygon_area(self.vertices)


def support_polygon(contact_patches: Sequence[Iterable[Sequence[float]]]) -> SupportPolygon:
    """Convex hull of every vertex of every contact patch.

    Degenerate hulls (a point or a segment) are flagged; an empty contact
    list is an error.
    """
    if len(contact_patches) == 0:
        raise ValueError("support polygon needs at least one contact patch")
    points = [p for patch in contact_patches for p in patch]
    if not points:
        raise ValueError("contact patches contain no points")
    hull = _geom.convex_hull(points)
    return SupportPolygon(
        vertices=tuple((float(x), float(y)) for x, y in hull),
        degenerate=len(hull) < 3,
    )


def stability_margin(polygon: SupportPolygon, com_xy: Sequence[float]) -> float:
    """Signed distance (mm) from the CoM projection to the polygon boundary."""
    return _geom.signed_margin(polygon.vertices, com_xy)


def is_stable(margin: float) -> bool:
    return margin >= -BOUNDARY_TOL_MM


def erode(polygon: SupportPolygon, r: float) -> SupportPolygon:
    """Polygon shrunk by Minkowski erosion of radius r (may come back empty)."""
    if polygon.degenerate:
        raise ValueError("cannot erode a degenerate polygon")
    shrunk = _geom.erode_convex(polygon.vertices, r)
    return SupportPolygon(
        vertices=tuple((float(x), float(y)) for x, y in shrunk),
        degenerate=len(shrunk) < 3,
    )


@dataclass(frozen=True)
class SampleStability:
    t: float
    polygon: SupportPolygon
    com_xy: tuple[float, float]
    margin: float
    stable: bool


@dataclass
class StabilityReport:
    samples: list[SampleStability] = field(default_factory=list)

    @property
    def stable(self) -> bool:
        return all(s.stable for s in self.samples)

    @property
    def min_margin(self) -> float:
        return min((s.margin for s in self.samples), default=math.inf)

    @property
    def first_violation_t(self) -> float | None:
        for s in self.samples:
            if not s.stable:
                return s.t
        return None

    def summary(self) -> str:
        n_bad = sum(1 for s in self.samples if not s.stable)
        head = "stable" if self.stable else f"UNSTABLE ({n_bad} samples)"
        first = self.first_violation_t
        first_txt = "-" if first is None else f"{first:.3f}"
        margin = self.min_margin
        margin_txt = "-" if math.isinf(margin) else f"{margin:.3f}"
        return (
            f"{head}: {len(self.samples)} samples, min margin {margin_txt} mm, "
            f"first violation t={first_txt}"
        )

    def to_json(self) -> str:
        doc = {
            "stable": self.stable,
            "min_margin_mm": None if math.isinf(self.min_margin) else self.min_margin,
            "first_violation_t": self.first_violation_t,
            "samples": [
                {
                    "t": s.t,
                    "polygon": [list(v) for v in s.polygon.vertices],
                    "com": list(s.com_xy),
                    "margin_mm": s.margin,
                    "stable": s.stable,
                }
                for s in self.samples
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


class StabilityError(RuntimeError):
    """A generated trajectory failed the quasi-static stability check."""

    def __init__(self, report: StabilityReport, context: str = "") -> None:
        self.report = report
        t = report.first_violation_t
        worst = report.min_margin
        msg = (
            f"{context + ': ' if context else ''}stability violation at "
            f"t={t:.3f} s (min margin {worst:.3f} mm)"
        )
        super().__init__(msg)


def _contact_points_world(
    contact: Contact,
    models: Sequence[RobotModel],
    qs: Sequence[np.ndarray],
    placements: Sequence[np.ndarray],
) -> np.ndarray:
    """World-frame 3D points of one contact (patch vertices or link samples)."""
    from . import poses  # local import: poses builds on kinematics only

    model = models[contact.agent]
    q = qs[contact.agent]
    world_from_base = placements[contact.agent]
    if contact.kind == "foot":
        frame = world_from_base @ poses.foot_frame(model, q, str(contact.ref))
        polygon = model.foot.polygon
        pts = np.array([[x, y, 0.0, 1.0] for x, y in polygon]).T
        return (frame @ pts).T[:, :3]
    if contact.kind == "foot_point":
        frame = world_from_base @ poses.foot_frame(model, q, str(contact.ref))
        return frame[:3, 3][None, :]
    if contact.kind == "link":
        idx = int(contact.ref)
        fk = forward_kinematics(model, q)
        pts_base = fk.positions()
        a, b = pts_base[idx], pts_base[idx + 1]
        ts = np.linspace(0.0, 1.0, LINK_CONTACT_SAMPLES)
        line = a[None, :] + ts[:, None] * (b - a)[None, :]
        homog = np.hstack([line, np.ones((len(ts), 1))])
        world_line = (world_from_base @ homog.T).T[:, :3]
        # widen the centerline to the module's resting cross-section
        axis = world_line[-1, :2] - world_line[0, :2]
        norm = float(np.hypot(*axis))
        if norm < 1e-9:
            return world_line
        perp = np.array([-axis[1], axis[0], 0.0]) / norm * LINK_CONTACT_HALF_WIDTH_MM
        return np.vstack([world_line + perp, world_line - perp])
    raise ValueError(f"unknown contact kind {contact.kind!r}")


def validate_trajectory(
    models: RobotModel | Sequence[RobotModel],
    trajectory: Trajectory,
    schedule: ContactSchedule,
    check_contact_height: bool = True,
) -> StabilityReport:
    """Per-sample support polygon vs CoM projection for a scheduled trajectory.

    The schedule supplies, per sample, the world placement of each agent's
    base frame and the set of active contacts; everything else (FK, contact
    patches, CoM, hull, margin) is recomputed here.
    """
    if isinstance(models, RobotModel):
        models = (models,)
    if len(schedule.entries) != len(trajectory.samples):
        raise ScheduleMismatchError(
            f"schedule has {len(schedule.entries)} entries for "
            f"{len(trajectory.samples)} trajectory samples"
        )
    report = StabilityReport()
    masses = [total_mass(m) for m in models]
    for sample, entry in zip(trajectory.samples, schedule.entries):
        if len(entry.contacts) == 0:
            raise ScheduleMismatchError(f"no contacts scheduled at t={sample.t}")
        patches = []
        for contact in entry.contacts:
            pts = _contact_points_world(contact, models, sample.qs, entry.placements)
            if check_contact_height and np.abs(pts[:, 2]).max() > CONTACT_HEIGHT_TOL_MM:
                raise ScheduleMismatchError(
                    f"contact {contact} is {np.abs(pts[:, 2]).max():.2f} mm off the "
                    f"ground at t={sample.t}"
                )
            patches.append(pts[:, :2].tolist())
        polygon = support_polygon(patches)

        com_accum = np.zeros(3)
        for model, q, place, mass in zip(models, sample.qs, entry.placements, masses):
            com_base = center_of_mass(model, q)
            com_world = place @ np.append(com_base, 1.0)
            com_accum += mass * com_world[:3]
        com_xy = com_accum[:2] / sum(masses)

        margin = stability_margin(polygon, com_xy)
        report.samples.append(
            SampleStability(
                t=sample.t,
                polygon=polygon,
                com_xy=(float(com_xy[0]), float(com_xy[1])),
                margin=margin,
                stable=is_stable(margin),
            )
        )
    return report
