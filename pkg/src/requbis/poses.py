"""Canonical poses, foot frames, world placements, and small pose solvers.

Walking modes place the chain "on its side": the plane-A joints
(0, 1, 3, 5, 6) bend in the world x-z plane and the plane-B joints (2, 4)
yaw about near-vertical axes. In that placement a planar pose is fully
described by the headings of the five rigid in-plane pieces:

    piece   links   length  heading
    1       1       112     h1
    2       2,3     150     h2   (joint 2 is a yaw, so links 2,3 stay
    3       4,5     150     h4    in-plane together; same for links 4,5)
    4       6       75      h6
    5       7       112     h7

Heading is measured in the ground x-z plane from +x toward +z. Joint values
follow from heading differences; joint 3's axis is flipped by the roll
pattern, so its contribution enters with a minus sign.

The tail foot is the post set on the base piece (frame: base rolled so the
patch lies in the ground plane); the head foot is the post set at the tip of
link 7 (flat when h7 = -90 with zero yaws).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kinematics import forward_kinematics, rot_x
from .model import RobotModel

PIECE_LENGTHS = (112.0, 150.0, 150.0, 75.0, 112.0)

TAIL_FOOT = "tail"
HEAD_FOOT = "head"


def rot_y(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0, s, 0], [0, 1, 0, 0], [-s, 0, c, 0], [0, 0, 0, 1]], dtype=float)


def rot_z(angle_deg: float) -> np.ndarray:
    a = math.radians(angle_deg)
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], dtype=float)


def translate(x: float, y: float, z: float) -> np.ndarray:
    m = np.eye(4)
    m[:3, 3] = (x, y, z)
    return m


# Rolls the chain onto its side: base x stays world x, base y becomes world
# up. Plane-A joints then pitch in the x-z plane.
SIDE_LYING = rot_x(90.0)

# Foot contact frames. The tail patch lies in the base x-y plane rotated so
# its normal is the base +y axis (world up when side-lying); the head mount
# orients the tip patch the same way, flat (normal up, x along the walk
# axis) when h7 = -90 with zero yaws.
TAIL_FOOT_MOUNT = rot_x(-90.0)
HEAD_FOOT_MOUNT = rot_z(90.0) @ rot_x(-90.0)


def foot_frame(model: RobotModel, q, which: str) -> np.ndarray:
    """Base-frame pose of a foot's contact frame (patch in its x-y plane)."""
    if which == TAIL_FOOT:
        return TAIL_FOOT_MOUNT.copy()
    if which == HEAD_FOOT:
        fk = forward_kinematics(model, q)
        return fk.transforms[-1] @ HEAD_FOOT_MOUNT
    raise ValueError(f"unknown foot {which!r}")


def q_from_headings(
    h1: float, h2: float, h4: float, h6: float, h7: float,
    yaw2: float = 0.0, yaw4: float = 0.0,
) -> np.ndarray:
    """Joint vector of an in-plane pose given piece headings (deg)."""
    return np.array(
        [h1, h2 - h1, yaw2, -(h4 - h2), yaw4, h6 - h4, h7 - h6], dtype=float
    )


def headings_from_q(q) -> tuple[float, float, float, float, float]:
    h1 = q[0]
    h2 = h1 + q[1]
    h4 = h2 - q[3]
    h6 = h4 + q[5]
    h7 = h6 + q[6]
    return h1, h2, h4, h6, h7


def planar_points(h1: float, h2: float, h4: float, h6: float, h7: float) -> np.ndarray:
    """Ground-plane (x, z) positions of p0..p7 for an in-plane pose."""
    hs = (h1, h2, h2, h4, h4, h6, h7)
    lengths = (112.0, 75.0, 75.0, 75.0, 75.0, 75.0, 112.0)
    pts = [np.zeros(2)]
    for h, a in zip(hs, lengths):
        u = np.array([math.cos(math.radians(h)), math.sin(math.radians(h))])
        pts.append(pts[-1] + a * u)
    return np.array(pts)


def side_lying_placement(x: float = 0.0, y: float = 0.0, pitch_deg: float = 0.0) -> np.ndarray:
    """World placement of the chain base for side-lying poses.

    pitch rotates the whole robot in its sagittal plane (about world -y so a
    positive pitch raises the distal chain, matching heading convention).
    """
    return translate(x, y, 0.0) @ rot_y(-pitch_deg) @ SIDE_LYING


def world_points(model: RobotModel, q, placement: np.ndarray) -> np.ndarray:
    """World positions of p0..p7."""
    pts = forward_kinematics(model, q).positions()
    homog = np.hstack([pts, np.ones((len(pts), 1))])
    return (placement @ homog.T).T[:, :3]


# --- canonical biped stance (the "tent") -------------------------------------

BIPED_TENT_ALPHA = 42.0


def canonical_biped_stance() -> np.ndarray:
    """Standing pose at the end of the snake->biped transition.

    Both extreme motors sit at 90 deg: the feet are flat with the shin and
    shank vertical, and the body folds into a tent between them.
    """
    a = BIPED_TENT_ALPHA
    return q_from_headings(90.0, 180.0 - a, 180.0 + a, 180.0, 270.0)


# --- numeric helpers ----------------------------------------------------------


def solve_heading_pair(
    l_a: float, l_b: float, target: np.ndarray, elbow: int = 1
) -> tuple[float, float]:
    """Headings (deg) of a planar 2R chain l_a, l_b reaching `target` (x, z).

    elbow selects the branch (+1 / -1). Raises ValueError when out of reach.
    """
    x, z = float(target[0]), float(target[1])
    r2 = x * x + z * z
    r = math.sqrt(r2)
    if r > l_a + l_b + 1e-9 or r < abs(l_a - l_b) - 1e-9:
        raise ValueError(f"2R target ({x:.1f}, {z:.1f}) out of reach for ({l_a}, {l_b})")
    c = (r2 - l_a * l_a - l_b * l_b) / (2.0 * l_a * l_b)
    c = min(1.0, max(-1.0, c))
    bend = elbow * math.acos(c)
    base = math.atan2(z, x) - math.atan2(l_b * math.sin(bend), l_a + l_b * math.cos(bend))
    return math.degrees(base), math.degrees(base + bend)


def solve_leg_ik(
    model: RobotModel,
    q0: np.ndarray,
    joints: tuple[int, ...],
    target_base: np.ndarray,
    point: str | int = HEAD_FOOT,
    tol: float = 1e-8,
    max_iter: int = 60,
) -> np.ndarray:
    """Damped-Newton IK: adjust `joints` so a chain point reaches target_base.

    `point` is a foot name or a chain point index (0..7); target is in the
    base frame. Warm-start with q0. Raises RuntimeError when it fails to
    converge (targets are design-time verified, so this indicates a bad
    pose request).
    """
    q = np.array(q0, dtype=float)
    idx = list(joints)

    def chain_point(qv: np.ndarray) -> np.ndarray:
        if point == HEAD_FOOT:
            return forward_kinematics(model, qv).positions()[7]
        if point == TAIL_FOOT:
            return np.zeros(3)
        return forward_kinematics(model, qv).positions()[int(point)]

    target = np.asarray(target_base, dtype=float)
    for _ in range(max_iter):
        err = target - chain_point(q)
        if float(np.linalg.norm(err)) < tol:
            return q
        jac = np.zeros((3, len(idx)))
        eps = 1e-6
        for k, j in enumerate(idx):
            qp = q.copy()
            qp[j] += eps
            jac[:, k] = (chain_point(qp) - chain_point(q)) / eps
        step, *_ = np.linalg.lstsq(jac + 0.0, err, rcond=None)
        # damp large steps to stay on the manifold
        norm = float(np.linalg.norm(step))
        if norm > 30.0:
            step *= 30.0 / norm
        for k, j in enumerate(idx):
            q[j] += step[k]
    raise RuntimeError(
        f"leg IK failed: joints {joints} toward {target.tolist()} "
        f"(residual {float(np.linalg.norm(target - chain_point(q))):.4f} mm)"
    )


def ground_placement_from_contacts(
    model: RobotModel,
    q: np.ndarray,
    anchor_world_xy: tuple[float, float],
    pitch_deg: float = 0.0,
    anchor_point: int | str = 0,
    y: float = 0.0,
) -> np.ndarray:
    """Side-lying placement pitched by pitch_deg with a chosen chain point
    pinned at (x, y, 0)."""
    place = side_lying_placement(0.0, y, pitch_deg)
    pts = world_points(model, q, place)
    if anchor_point == TAIL_FOOT:
        p = pts[0]
    elif anchor_point == HEAD_FOOT:
        p = pts[7]
    else:
        p = pts[int(anchor_point)]
    dx = anchor_world_xy[0] - p[0]
    dz = -p[2]
    return translate(dx, 0.0, dz) @ place
