"""Planar geometry primitives shared by the stability and model modules."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

Point = tuple[float, float]


def cross(o: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Z component of (a-o) x (b-o); >0 for a counterclockwise turn."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]]) -> list[Point]:
    """Convex hull (Andrew monotone chain), counterclockwise, collinear points dropped.

    Degenerate inputs collapse: a single point gives [p], collinear points give
    the two extreme endpoints.
    """
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 2:
        return pts
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all points collinear
        return [pts[0], pts[-1]]
    return hull


def polygon_area(vertices: Sequence[Sequence[float]]) -> float:
    """Signed shoelace area (positive for counterclockwise order)."""
    n = len(vertices)
    acc = 0.0
    for i in range(n):
        x0, y0 = vertices[i][0], vertices[i][1]
        x1, y1 = vertices[(i + 1) % n][0], vertices[(i + 1) % n][1]
        acc += x0 * y1 - x1 * y0
    return 0.5 * acc


def is_convex_ccw(vertices: Sequence[Sequence[float]]) -> bool:
    """True when the vertex loop is convex and counterclockwise (no reflex turns)."""
    n = len(vertices)
    if n < 3:
        return False
    for i in range(n):
        if cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) <= 0:
            return False
    return True


def point_segment_distance(p: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    ax, ay = a[0], a[1]
    bx, by = b[0], b[1]
    px, py = p[0], p[1]
    dx, dy = bx - ax, by - ay
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / seg_len2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def point_line_distance(p: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Distance from p to the infinite line through a and b."""
    length = math.hypot(b[0] - a[0], b[1] - a[1])
    if length == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    return abs(cross(a, b, p)) / length


def point_in_convex(vertices: Sequence[Sequence[float]], p: Sequence[float]) -> bool:
    """Boundary-inclusive containment test for a convex CCW polygon."""
    n = len(vertices)
    for i in range(n):
        if cross(vertices[i], vertices[(i + 1) % n], p) < 0:
            return False
    return True


def signed_margin(vertices: Sequence[Sequence[float]], p: Sequence[float]) -> float:
    """Signed distance from p to the polygon boundary: positive inside.

    For degenerate "polygons" (one point or a segment) the result is the
    negated distance, which is never positive.
    """
    n = len(vertices)
    if n == 0:
        raise ValueError("empty polygon")
    if n == 1:
        return -math.hypot(p[0] - vertices[0][0], p[1] - vertices[0][1])
    if n == 2:
        return -point_segment_distance(p, vertices[0], vertices[1])
    inside = point_in_convex(vertices, p)
    if inside:
        return min(
            point_line_distance(p, vertices[i], vertices[(i + 1) % n]) for i in range(n)
        )
    return -min(
        point_segment_distance(p, vertices[i], vertices[(i + 1) % n]) for i in range(n)
    )


def clip_halfplane(
    vertices: list[Point], a: Sequence[float], b: Sequence[float]
) -> list[Point]:
    """Clip a polygon to the half-plane left of the directed line a->b."""
    out: list[Point] = []
    n = len(vertices)
    for i in range(n):
        cur = vertices[i]
        nxt = vertices[(i + 1) % n]
        cur_in = cross(a, b, cur) >= 0
        nxt_in = cross(a, b, nxt) >= 0
        if cur_in:
            out.append(cur)
        if cur_in != nxt_in:
            denom = cross(a, b, nxt) - cross(a, b, cur)
            t = -cross(a, b, cur) / denom
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def erode_convex(vertices: Sequence[Sequence[float]], r: float) -> list[Point]:
    """Minkowski erosion of a convex CCW polygon by radius r.

    Shifts every edge inward by r and intersects the half-planes; edges may
    vanish. Returns [] when the erosion is empty.
    """
    if r < 0:
        raise ValueError("erosion radius must be >= 0")
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    pad = 10.0 * (1.0 + max(xs) - min(xs) + max(ys) - min(ys))
    box: list[Point] = [
        (min(xs) - pad, min(ys) - pad),
        (max(xs) + pad, min(ys) - pad),
        (max(xs) + pad, max(ys) + pad),
        (min(xs) - pad, max(ys) + pad),
    ]
    result = box
    n = len(vertices)
    for i in range(n):
        a = np.asarray(vertices[i], dtype=float)
        b = np.asarray(vertices[(i + 1) % n], dtype=float)
        edge = b - a
        length = float(np.hypot(*edge))
        if length == 0.0:
            continue
        inward = np.array([-edge[1], edge[0]]) / length  # left normal of CCW edge
        a2, b2 = a + inward * r, b + inward * r
        result = clip_halfplane(result, a2, b2)
        if not result:
            return []
    return result
