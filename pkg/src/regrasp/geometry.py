"""Planar convex geometry: hulls, containment and signed boundary margins.

All coordinates are millimetres. Polygons are strictly convex,
counter-clockwise, and canonically start at the lexicographically smallest
vertex so that equal polygons compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateInput

# Orientation tolerance (mm^2). Inputs are physical foot corners with
# |coord| < 1e4 mm, far from degeneracy; exact predicates are not needed.
ORIENT_EPS = 1e-9


@dataclass(frozen=True, order=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


def _cross(o: Point2, a: Point2, b: Point2) -> float:
    """z-component of (a - o) x (b - o)."""
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


@dataclass(frozen=True)
class ConvexPolygon:
    """Strictly convex CCW polygon; construction validates the invariants."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(verts) < 3:
            raise DegenerateInput(f"polygon needs >= 3 vertices, got {len(verts)}")
        n = len(verts)
        for i in range(n):
            c = _cross(verts[i], verts[(i + 1) % n], verts[(i + 2) % n])
            if c <= ORIENT_EPS:
                raise DegenerateInput(
                    "vertices are not strictly convex in CCW order "
                    f"(cross={c:.3e} at index {i})"
                )
        start = min(range(n), key=lambda i: (verts[i].x, verts[i].y))
        object.__setattr__(self, "vertices", verts[start:] + verts[:start])

    def edges(self):
        verts = self.vertices
        n = len(verts)
        return [(verts[i], verts[(i + 1) % n]) for i in range(n)]


def convex_hull(points: list[Point2]) -> ConvexPolygon:
    """Minimal strictly convex polygon containing all points (monotone chain).

    Collinear points are dropped so the result has a unique canonical form.
    Raises DegenerateInput for fewer than 3 distinct points or an all-collinear
    input.
    """
    uniq: list[Point2] = []
    seen = set()
    for p in points:
        key = (p.x, p.y)
        if key not in seen:
            seen.add(key)
            uniq.append(p)
    if len(uniq) < 3:
        raise DegenerateInput(f"need >= 3 distinct points, got {len(uniq)}")
    pts = sorted(uniq, key=lambda p: (p.x, p.y))

    def half(chain_pts):
        chain: list[Point2] = []
        for p in chain_pts:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= ORIENT_EPS:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return ConvexPolygon(tuple(hull))


def contains(polygon: ConvexPolygon, p: Point2) -> bool:
    """True iff p is inside or on the boundary (closed-set convention)."""
    return all(_cross(a, b, p) >= -ORIENT_EPS for a, b in polygon.edges())


def _segment_distance(p: Point2, a: Point2, b: Point2) -> float:
    abx, aby = b.x - a.x, b.y - a.y
    apx, apy = p.x - a.x, p.y - a.y
    denom = abx * abx + aby * aby
    t = 0.0 if denom == 0.0 else max(0.0, min(1.0, (apx * abx + apy * aby) / denom))
    dx = apx - t * abx
    dy = apy - t * aby
    return math.hypot(dx, dy)


def signed_margin(polygon: ConvexPolygon, p: Point2) -> float:
    """Signed distance from p to the polygon boundary.

    Positive inside, zero on the boundary, negative of the boundary distance
    outside.
    """
    d = min(_segment_distance(p, a, b) for a, b in polygon.edges())
    return d if contains(polygon, p) else -d
