"""DH transforms, chain forward kinematics, center of mass, planar leg IK.

Frame conventions
-----------------
The chain is assembled as ``M_i = M_{i-1} @ Rx(theta_offset_i) @ Rz(q_i) @ Tx(a_i)``
with the base frame at the proximal end of link 1. ``theta_offset`` is the
structural roll of the link mount, so a JointVector of zeros is the straight
chain (commanded neutral) regardless of offsets.

Accumulating the Table rolls gives the joint actuation axes at the zero pose
(base frame axes; the chain runs along +x):

    joint   axis   plane
    0       +z     A          (ankle, tail side)
    1       +z     A          (knee, tail side)
    2       -y     B          (hip yaw, tail side)
    3       -z     A          (spine)
    4       +y     B          (hip yaw, head side)
    5       +z     A          (knee, head side)
    6       +z     A          (ankle, head side)

Plane A carries the walking-gait sagittal bends once the robot lies on its
side; plane B carries the hip sweeps. This table is the single authoritative
axis assignment; tests assert against it.

All functions are pure; angles are degrees at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import LINK_COUNT, DHRow, RobotModel

# joint index -> rotation axis in the base frame at the zero pose
JOINT_AXES_ZERO_POSE = (
    (0.0, 0.0, 1.0),
    (0.0, 0.0, 1.0),
    (0.0, -1.0, 0.0),
    (0.0, 0.0, -1.0),
    (0.0, 1.0, 0.0),
    (0.0, 0.0, 1.0),
    (0.0, 0.0, 1.0),
)

# joints whose axes share plane A (sagittal once side-lying) / plane B (yaw)
PLANE_A_JOINTS = (0, 1, 3, 5, 6)
PLANE_B_JOINTS = (2, 4)


class UnreachableTargetError(ValueError):
    """planar_leg_ik target lies outside the reachable annulus."""


def as_joint_vector(q) -> np.ndarray:
    arr = np.asarray(q, dtype=float)
    if arr.shape != (LINK_COUNT,):
        raise ValueError(f"joint vector must have shape (7,), got {arr.shape}")
    return arr


def within_limits(model: RobotModel, q, tol: float = 1e-9) -> bool:
    arr = as_joint_vector(q)
    return all(
        lo - tol <= qi <= hi + tol for qi, (lo, hi) in zip(arr, model.joint_limits)
    )


def rot_x(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array(
        [[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1]], dtype=float
    )


def dh_transform(row: DHRow, q_deg: float) -> np.ndarray:
    """Homogeneous transform of one DH row with theta = q + theta_offset."""
    theta = math.radians(q_deg + row.theta_offset)
    alpha = math.radians(row.alpha)
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    return np.array(
        [
            [ct, -st * ca, st * sa, row.a * ct],
            [st, ct * ca, -ct * sa, row.a * st],
            [0.0, sa, ca, row.d],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=float,
    )


def link_transform(row: DHRow, q_deg: float) -> np.ndarray:
    """Chain-assembly transform: mounting roll, then the joint rotation."""
    planar = DHRow(d=row.d, theta_offset=0.0, a=row.a, alpha=row.alpha)
    return rot_x(row.theta_offset) @ dh_transform(planar, q_deg)


@dataclass(frozen=True)
class FrameSet:
    """Base-to-link transforms for all 7 links; the last one is the end effector."""

    transforms: tuple[np.ndarray, ...]

    @property
    def end_effector(self) -> np.ndarray:
        return self.transforms[-1]

    def positions(self) -> np.ndarray:
        """8x3 array: base origin followed by each link frame origin (mm)."""
        pts = [np.zeros(3)]
        pts.extend(t[:3, 3] for t in self.transforms)
        return np.array(pts)

    def max_orthonormality_error(self) -> float:
        err = 0.0
        for t in self.transforms:
            r = t[:3, :3]
            err = max(err, float(np.abs(r.T @ r - np.eye(3)).max()))
        return err


def forward_kinematics(model: RobotModel, q) -> FrameSet:
    arr = as_joint_vector(q)
    frames = []
    m = np.eye(4)
    for row, qi in zip(model.dh, arr):
        m = m @ link_transform(row, qi)
        frames.append(m)
    return FrameSet(transforms=tuple(frames))


def link_midpoints(model: RobotModel, q) -> np.ndarray:
    pts = forward_kinematics(model, q).positions()
    return 0.5 * (pts[:-1] + pts[1:])


def center_of_mass(model: RobotModel, q) -> np.ndarray:
    """Mass-weighted average of link midpoints, mechanism lumped at the center link."""
    mids = link_midpoints(model, q)
    masses = np.asarray(model.link_masses, dtype=float).copy()
    masses[3] += model.mechanism_mass_g
    return masses @ mids / masses.sum()


@dataclass(frozen=True)
class PlanarLeg:
    """Two-segment planar leg, lengths in mm, base at the hip."""

    l1: float
    l2: float

    def __post_init__(self) -> None:
        if self.l1 <= 0 or self.l2 <= 0:
            raise ValueError("leg segment lengths must be positive")


def planar_leg_fk(leg: PlanarLeg, hip_deg: float, knee_deg: float) -> np.ndarray:
    """Foot position of the planar leg in its hip frame."""
    a1 = math.radians(hip_deg)
    a2 = a1 + math.radians(knee_deg)
    return np.array(
        [leg.l1 * math.cos(a1) + leg.l2 * math.cos(a2),
         leg.l1 * math.sin(a1) + leg.l2 * math.sin(a2)]
    )


def planar_leg_ik(
    leg: PlanarLeg, target, branch: str = "knee_up"
) -> tuple[float, float]:
    """Geometric 2R inverse kinematics.

    branch selects the elbow solution: "knee_up" returns a non-negative knee
    angle, "knee_down" the mirrored one. Raises UnreachableTargetError with
    the distance to the reachable annulus when no solution exists.
    """
    if branch not in ("knee_up", "knee_down"):
        raise ValueError(f"unknown IK branch {branch!r}")
    x, y = float(target[0]), float(target[1])
    r = math.hypot(x, y)
    r_min, r_max = abs(leg.l1 - leg.l2), leg.l1 + leg.l2
    # tolerate float dust at the annulus boundary
    tol = 1e-9 * max(1.0, r_max)
    if r > r_max + tol or r < r_min - tol:
        gap = r - r_max if r > r_max else r_min - r
        raise UnreachableTargetError(
            f"target ({x:.3f}, {y:.3f}) outside reachable annulus "
            f"[{r_min:.3f}, {r_max:.3f}] by {gap:.6f} mm"
        )
    c2 = (r * r - leg.l1**2 - leg.l2**2) / (2.0 * leg.l1 * leg.l2)
    c2 = min(1.0, max(-1.0, c2))
    knee = math.acos(c2)
    if branch == "knee_down":
        knee = -knee
    hip = math.atan2(y, x) - math.atan2(
        leg.l2 * math.sin(knee), leg.l1 + leg.l2 * math.cos(knee)
    )
    return math.degrees(hip), math.degrees(knee)
