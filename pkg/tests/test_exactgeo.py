import random

import pytest
from hypothesis import given, settings, strategies as st

from hellygrid.errors import DegenerateHullError
from hellygrid.exactgeo import (
    GridPoint,
    Location,
    Polygon,
    column_bounds,
    convex_hull,
    cross,
    cross_section,
    is_strictly_convex_position,
    orientation,
    point_in_polygon,
)

PENTAGON = [(2, 2), (3, 3), (2, 3), (3, 5), (5, 7)]


def hull_vertices_brute(pts):
    """Strict hull vertices via the O(n^3) supporting-edge test."""
    pts = list(set(pts))
    verts = set()
    for p in pts:
        for q in pts:
            if p == q:
                continue
            ok = True
            for r in pts:
                if r in (p, q):
                    continue
                c = cross(p, q, r)
                if c < 0:
                    ok = False
                    break
                if c == 0 and not (
                    min(p[0], q[0]) <= r[0] <= max(p[0], q[0])
                    and min(p[1], q[1]) <= r[1] <= max(p[1], q[1])
                ):
                    ok = False
                    break
            if ok:
                verts.update((p, q))
    return verts


def test_orientation():
    assert orientation((0, 0), (1, 0), (0, 1)) == 1
    assert orientation((0, 0), (1, 1), (2, 2)) == 0
    assert orientation((2, 2), (3, 3), (5, 7)) == 1
    assert cross((2, 2), (3, 3), (5, 7)) == 2


def test_hull_examples():
    assert convex_hull(PENTAGON).vertices == ((2, 2), (3, 3), (5, 7), (3, 5), (2, 3))
    assert convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)]).vertices == ((0, 0), (1, 0), (1, 1), (0, 1))
    assert convex_hull([(0, 0), (2, 0), (1, 0), (0, 2)]).vertices == ((0, 0), (2, 0), (0, 2))


def test_hull_degenerate():
    with pytest.raises(DegenerateHullError):
        convex_hull([(0, 0), (1, 1), (2, 2)])
    with pytest.raises(DegenerateHullError):
        convex_hull([(0, 0), (1, 1), (0, 0)])


def test_convex_position():
    assert is_strictly_convex_position(PENTAGON)
    assert not is_strictly_convex_position([(0, 0), (1, 1), (2, 2), (0, 2)])
    assert not is_strictly_convex_position([(0, 0), (4, 0), (4, 4), (2, 1)])
    assert not is_strictly_convex_position([(0, 0), (1, 0)])


def test_point_location():
    pent = convex_hull(PENTAGON)
    assert point_in_polygon((3, 4), pent) is Location.INTERIOR
    assert point_in_polygon((3, 3), pent) is Location.BOUNDARY
    assert point_in_polygon((2, 5), pent) is Location.OUTSIDE
    # edge-interior point counts as boundary
    tri = Polygon(((0, 0), (2, 0), (0, 2)))
    assert point_in_polygon((1, 0), tri) is Location.BOUNDARY
    assert point_in_polygon((1, 1), tri) is Location.BOUNDARY


def test_cross_section_examples():
    pent = convex_hull(PENTAGON)
    assert cross_section(pent, 3) == (3, 5)
    assert cross_section(pent, 2) == (2, 3)
    assert cross_section(pent, 6) is None
    assert cross_section(pent, 4) == (5, 6)
    tri = Polygon(((0, 0), (3, 1), (1, 3)))
    lo, hi = cross_section(tri, 2)
    assert (lo, hi) == (pytest.approx(2 / 3), 2)
    assert lo.denominator == 3
    assert column_bounds(tri, 2) == (1, 2)


def test_polygon_validation():
    with pytest.raises(DegenerateHullError):
        Polygon(((0, 0), (1, 0)))
    with pytest.raises(DegenerateHullError):
        Polygon(((0, 0), (0, 1), (1, 0)))  # clockwise
    with pytest.raises(DegenerateHullError):
        Polygon(((0, 0), (1, 0), (2, 0), (1, 1)))  # collinear triple
    with pytest.raises(ValueError):
        Polygon(((1, 0), (0, 1), (0, 0)))  # not starting at lex-min


def test_gridpoint_json():
    p = GridPoint(10**30, -7)
    assert p.to_json() == [str(10**30), "-7"]
    assert GridPoint.from_json(p.to_json()) == p


coords = st.integers(-40, 40)
point_sets = st.lists(st.tuples(coords, coords), min_size=3, max_size=25)


@settings(max_examples=200, deadline=None)
@given(point_sets)
def test_hull_matches_brute_force(pts):
    brute = hull_vertices_brute(pts)
    try:
        hull = convex_hull(pts)
    except DegenerateHullError:
        assert len(set(pts)) < 3 or all(cross(pts[0], a, b) == 0 for a in pts for b in pts)
        return
    assert set(hull.vertices) == brute
    assert hull.vertices[0] == min(hull.vertices)


@settings(max_examples=100, deadline=None)
@given(point_sets, st.randoms())
def test_hull_permutation_and_duplication(pts, rnd):
    try:
        ref = convex_hull(pts)
    except DegenerateHullError:
        return
    shuffled = pts + rnd.sample(pts, len(pts) // 2)
    rnd.shuffle(shuffled)
    assert convex_hull(shuffled) == ref


def random_polygon(rng, span=30):
    while True:
        pts = [(rng.randint(-span, span), rng.randint(-span, span)) for _ in range(rng.randint(3, 12))]
        try:
            return convex_hull(pts)
        except DegenerateHullError:
            continue


def test_cross_section_agrees_with_point_location():
    rng = random.Random(11)
    pairs = 0
    for _ in range(300):
        poly = random_polygon(rng)
        x0, x1, y0, y1 = poly.bbox()
        for x in range(x0, x1 + 1):
            lo, hi = cross_section(poly, x)
            assert lo <= hi
            assert column_bounds(poly, x) in (None, (-(-lo.numerator // lo.denominator), hi.numerator // hi.denominator))
            for y in range(y0 - 1, y1 + 2):
                inside = point_in_polygon((x, y), poly) is not Location.OUTSIDE
                assert inside == (lo <= y <= hi)
                pairs += 1
    assert pairs > 1000


@settings(max_examples=100, deadline=None)
@given(point_sets, st.integers(-10**12, 10**12), st.tuples(coords, coords))
def test_translation_commutes(pts, t, q):
    try:
        hull = convex_hull(pts)
    except DegenerateHullError:
        return
    moved = convex_hull([(x + t, y + t) for x, y in pts])
    assert moved == hull.translate(t, t)
    assert point_in_polygon((q[0] + t, q[1] + t), moved) is point_in_polygon(q, hull)
    x = hull.vertices[0].x
    lo, hi = cross_section(hull, x)
    assert cross_section(moved, x + t) == (lo + t, hi + t)


@given(st.tuples(coords, coords), st.tuples(coords, coords), st.tuples(coords, coords))
def test_orientation_antisymmetric(p, q, r):
    assert orientation(p, q, r) == -orientation(p, r, q)
