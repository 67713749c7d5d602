"""Exact planar geometry on integer points.

Everything here is integer or ``fractions.Fraction`` arithmetic; there
is no tolerance anywhere.  Polygons are closed: a point on an edge is on
the polygon.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import DegenerateHullError


class GridPoint(NamedTuple):
    x: int
    y: int

    def to_json(self):
        return [str(self.x), str(self.y)]

    @classmethod
    def from_json(cls, pair):
        x, y = pair
        return cls(int(x), int(y))


class Location(enum.Enum):
    OUTSIDE = "outside"
    BOUNDARY = "boundary"
    INTERIOR = "interior"


def as_point(p) -> GridPoint:
    return p if isinstance(p, GridPoint) else GridPoint(int(p[0]), int(p[1]))


def cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def orientation(p, q, r) -> int:
    """+1 for a left turn p->q->r, -1 for a right turn, 0 if collinear."""
    c = cross(p, q, r)
    return (c > 0) - (c < 0)


@dataclass(frozen=True)
class Polygon:
    """Strictly convex polygon, vertices counter-clockwise from the lexicographic minimum."""

    vertices: tuple

    def __post_init__(self):
        vs = tuple(as_point(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        n = len(vs)
        if n < 3:
            raise DegenerateHullError("a polygon needs at least 3 vertices")
        if len(set(vs)) != n:
            raise DegenerateHullError("repeated vertex")
        for i in range(n):
            if cross(vs[i - 2], vs[i - 1], vs[i]) <= 0:
                raise DegenerateHullError(
                    f"vertices {vs[i - 2]}, {vs[i - 1]}, {vs[i]} are not a strict left turn"
                )
        if vs[0] != min(vs):
            raise ValueError("polygon must start at its lexicographically smallest vertex")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def edges(self):
        vs = self.vertices
        return zip(vs, vs[1:] + vs[:1])

    def bbox(self):
        xs = [v.x for v in self.vertices]
        ys = [v.y for v in self.vertices]
        return min(xs), max(xs), min(ys), max(ys)

    def translate(self, dx: int, dy: int) -> "Polygon":
        return Polygon(tuple(GridPoint(v.x + dx, v.y + dy) for v in self.vertices))


def convex_hull(points: Iterable) -> Polygon:
    """Strict convex hull (collinear boundary points dropped) by monotone chain."""
    pts = sorted(set(as_point(p) for p in points))
    if len(pts) < 3:
        raise DegenerateHullError(f"need 3 distinct points, got {len(pts)}")

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHullError("all points are collinear")
    return Polygon(tuple(hull))


def is_strictly_convex_position(points: Iterable) -> bool:
    pts = [as_point(p) for p in points]
    if len(pts) < 3:
        return False
    try:
        hull = convex_hull(pts)
    except DegenerateHullError:
        return False
    return len(hull) == len(pts) and set(hull.vertices) == set(pts)


def point_in_polygon(pt, poly: Polygon) -> Location:
    pt = as_point(pt)
    on_line = False
    for a, b in poly.edges():
        c = cross(a, b, pt)
        if c < 0:
            return Location.OUTSIDE
        if c == 0:
            on_line = True
    return Location.BOUNDARY if on_line else Location.INTERIOR


def cross_section(poly: Polygon, x: int):
    """Closed interval (y_lo, y_hi) of the vertical slice at ``x``, or None."""
    x0, x1, _, _ = poly.bbox()
    if x < x0 or x > x1:
        return None
    ys = []
    for a, b in poly.edges():
        if a.x == b.x:
            if a.x == x:
                ys.extend((Fraction(a.y), Fraction(b.y)))
        elif min(a.x, b.x) <= x <= max(a.x, b.x):
            ys.append(a.y + Fraction((b.y - a.y) * (x - a.x), b.x - a.x))
    return min(ys), max(ys)


def column_bounds(poly: Polygon, x: int):
    """Integer range [ceil(y_lo), floor(y_hi)] of the slice at ``x``, or None.

    Same slice as :func:`cross_section`, computed with floor division only.
    """
    x0, x1, _, _ = poly.bbox()
    if x < x0 or x > x1:
        return None
    lo = hi = None
    for a, b in poly.edges():
        if a.x == b.x:
            if a.x != x:
                continue
            c_lo, c_hi = min(a.y, b.y), max(a.y, b.y)
        elif min(a.x, b.x) <= x <= max(a.x, b.x):
            num = a.y * (b.x - a.x) + (b.y - a.y) * (x - a.x)
            den = b.x - a.x
            if den < 0:
                num, den = -num, -den
            c_lo = -((-num) // den)
            c_hi = num // den
        else:
            continue
        lo = c_lo if lo is None else min(lo, c_lo)
        hi = c_hi if hi is None else max(hi, c_hi)
    return lo, hi
