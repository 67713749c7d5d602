"""Largest empty convex polygon search in finite grid windows.

Two strategies share one contract: ``dp`` (anchor + angular order +
visibility-graph chaining, compiled) and ``exhaustive`` (plain
enumeration of every empty convex polygon of a small window).  Ties
between maximum polygons go to the lexicographically smallest vertex
list, vertices counter-clockwise from the lexicographic minimum.  Every result is re-verified exactly before it is returned.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import seqgen
from .emptiness import (
    FLATNESS_F2,
    IntMinusPrimeSquareGrid,
    ProductGrid,
    flatness_vertex_bound,
    make_certificate,
    verify_empty,
)
from .errors import HellyGridError, ResourceError
from .exactgeo import GridPoint, Location, Polygon, cross, point_in_polygon

log = logging.getLogger(__name__)

WINDOW_CAP = 10**5
DP_CAP = 5000
EXHAUSTIVE_CAP = 64
_SPAN_LIMIT = 2**24

KINDS = ("product", "complement_product", "int_complement_of_product")
COMPLEMENT_KINDS = ("complement_product", "int_complement_of_product")


@dataclass(frozen=True)
class GridWindow:
    kind: str
    x_range: tuple
    y_range: tuple
    points: tuple
    grid: object = field(repr=False, compare=False)
    factor_kind: str | None = None

    def __len__(self):
        return len(self.points)

    def describe(self) -> dict:
        d = {
            "kind": self.kind,
            "x_range": [str(self.x_range[0]), str(self.x_range[1])],
            "y_range": [str(self.y_range[0]), str(self.y_range[1])],
            "points": len(self.points),
        }
        if self.factor_kind:
            d["factor"] = self.factor_kind
        return d


def _window_factor(factor, lo, hi):
    """Factor sequence restricted to [lo, hi] plus its grid descriptor."""
    if factor == "primes":
        seq = seqgen.primes_in_range(max(lo, 2), hi) if hi >= 2 else seqgen.custom([])
        return seq.elements, {"kind": "primes", "lo": str(lo), "hi": str(hi)}
    if factor == "composites":
        seq = seqgen.composites_in_range(lo, hi)
        return seq.elements, {"kind": "composites", "lo": str(lo), "hi": str(hi)}
    if isinstance(factor, seqgen.Sequence):
        els = tuple(e for e in factor.elements if lo <= e <= hi)
        return els, {"kind": "custom", "elements": [str(e) for e in els]}
    raise ValueError(f"unsupported factor {factor!r}")


def materialize_window(kind, x_range, y_range=None, factor="primes", cap=WINDOW_CAP) -> GridWindow:
    """Materialize a finite grid window; points sorted lexicographically.

    ``kind`` is one of ``product`` (factor x factor; ``factor`` is
    "primes", "composites" or an explicit Sequence), ``complement_product``
    ((Z minus P)^2) or ``int_complement_of_product`` (Z^2 minus P^2).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown window kind {kind!r}")
    y_range = x_range if y_range is None else y_range
    (x0, x1), (y0, y1) = (tuple(map(int, x_range)), tuple(map(int, y_range)))
    if x1 < x0 or y1 < y0:
        raise ValueError("window ranges must be nonempty")
    lo, hi = min(x0, y0), max(x1, y1)
    if kind == "int_complement_of_product":
        if (x1 - x0 + 1) * (y1 - y0 + 1) > 4 * cap:
            raise ResourceError(f"window exceeds the population cap {cap}")
        grid = IntMinusPrimeSquareGrid(lo, hi)
        pts = tuple(grid.members_in_box(x0, x1, y0, y1))
        factor_kind = None
    else:
        if kind == "complement_product":
            factor = "composites"
        els, desc = _window_factor(factor, lo, hi)
        grid = ProductGrid(els, lo, hi, desc)
        xs = grid.axis_members(x0, x1)
        ys = grid.axis_members(y0, y1)
        if len(xs) * len(ys) > cap:
            raise ResourceError(f"window holds {len(xs) * len(ys)} points, cap is {cap}")
        pts = tuple(GridPoint(x, y) for x in xs for y in ys)
        factor_kind = factor if isinstance(factor, str) else factor.kind
    if len(pts) > cap:
        raise ResourceError(f"window holds {len(pts)} points, cap is {cap}")
    return GridWindow(kind, (x0, x1), (y0, y1), pts, grid, factor_kind)


def window_from_points(points, lo=None, hi=None) -> GridWindow:
    """Window over an arbitrary finite point set (the set is its own grid)."""
    pts = tuple(sorted(set(GridPoint(int(x), int(y)) for x, y in points)))
    grid = _PointSetGrid(pts)
    xs = [p.x for p in pts] or [0]
    ys = [p.y for p in pts] or [0]
    return GridWindow("product", (min(xs), max(xs)), (min(ys), max(ys)), pts, grid, "points")


class _PointSetGrid:
    """An explicit finite point set with whole-plane coverage."""

    descriptor = None

    def __init__(self, pts):
        self.pts = frozenset(pts)
        cols = {}
        for p in pts:
            cols.setdefault(p.x, []).append(p.y)
        self.cols = {x: sorted(v) for x, v in cols.items()}
        self.xs = sorted(cols)

    def covers(self, *box):
        return True

    def check_coverage(self, *box):
        pass

    def contains(self, pt):
        return GridPoint(*pt) in self.pts

    def xs_in(self, a, b):
        return [x for x in self.xs if a <= x <= b]

    def column(self, x, a, b):
        return [y for y in self.cols.get(x, ()) if a <= y <= b]

    def population(self, x0, x1, y0, y1):
        return sum(1 for _ in self.members_in_box(x0, x1, y0, y1))

    def members_in_box(self, x0, x1, y0, y1):
        return (p for p in sorted(self.pts) if x0 <= p.x <= x1 and y0 <= p.y <= y1)


@dataclass(frozen=True)
class SearchResult:
    best: Polygon | None
    vertex_count: int
    strategy: str
    nodes_explored: int
    elapsed: float
    window: GridWindow | None = field(default=None, repr=False, compare=False)

    def search_block(self) -> dict:
        return {
            "strategy": self.strategy,
            "window": self.window.describe() if self.window is not None else None,
            "nodes_explored": self.nodes_explored,
            "elapsed_ms": round(self.elapsed * 1000),
        }

    def certificate(self):
        if self.best is None:
            raise HellyGridError("no polygon to certify")
        report = verify_empty(self.best.vertices, self.window.grid)
        return make_certificate(
            self.best.vertices, self.window.grid, report, search=self.search_block()
        )


def _search_dp(points):
    n = len(points)
    if n < 3:
        return None, 0
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    x0, y0 = min(xs), min(ys)
    if max(xs) - x0 >= _SPAN_LIMIT or max(ys) - y0 >= _SPAN_LIMIT:
        raise ResourceError(f"window coordinate span must stay below {_SPAN_LIMIT}")
    from . import _kernels

    X = np.asarray([x - x0 for x in xs], dtype=np.int64)
    Y = np.asarray([y - y0 for y in ys], dtype=np.int64)
    best, edges, status = _kernels.anchor_best(X, Y)
    if status != 0:
        raise HellyGridError("angular order could not be certified exactly")
    top = int(best.max())
    if top < 3:
        return None, int(edges)
    anchor = int(np.flatnonzero(best == top)[0])
    order = _kernels.reconstruct(X, Y, anchor, top)
    if order.min() < 0:
        raise HellyGridError("reconstruction of the optimal polygon failed")
    return tuple(points[i] for i in order.tolist()), int(edges)


def _search_exhaustive(points):
    """Enumerate every empty convex polygon; pure Python, no shared code with the kernel.

    A polygon is visited once, from its lexicographically smallest vertex,
    as a counter-clockwise chain whose fan triangles are checked against
    every window point.
    """
    pts = list(points)
    n = len(pts)
    tri_cache = {}
    nodes = 0

    def fan_triangle_empty(a, i, j):
        key = (a, i, j)
        hit = tri_cache.get(key)
        if hit is None:
            tri = Polygon((pts[a], pts[i], pts[j]))
            hit = all(
                k in key or point_in_polygon(pts[k], tri) is Location.OUTSIDE for k in range(n)
            )
            tri_cache[key] = hit
        return hit

    best = (0, ())
    for a in range(n):
        pa = pts[a]
        stack = [(a, i, (a, i)) for i in range(n - 1, a, -1)]
        while stack:
            prev, cur, chain = stack.pop()
            nodes += 1
            pc = pts[cur]
            pp = pts[prev]
            for j in range(a + 1, n):
                if j in chain:
                    continue
                pj = pts[j]
                if cross(pa, pc, pj) <= 0:
                    continue  # keeps angles around the anchor increasing
                if len(chain) > 2 and cross(pp, pc, pj) <= 0:
                    continue
                if not fan_triangle_empty(a, cur, j):
                    continue
                nxt = chain + (j,)
                cand = (len(nxt), tuple(pts[t] for t in nxt))
                if cand[0] > best[0] or (cand[0] == best[0] and cand[1] < best[1]):
                    best = cand
                stack.append((cur, j, nxt))
    return (best[1] if best[0] >= 3 else None), nodes


def largest_empty_convex_polygon(
    window: GridWindow, strategy: str = "dp", cap: int | None = None
) -> SearchResult:
    pts = window.points
    if strategy == "dp":
        limit = DP_CAP if cap is None else cap
    elif strategy == "exhaustive":
        limit = EXHAUSTIVE_CAP if cap is None else cap
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if len(pts) > limit:
        raise ResourceError(f"{strategy} search allows {limit} points, window has {len(pts)}")
    if not pts:
        raise ValueError("window is empty")
    t0 = time.perf_counter()
    if strategy == "dp":
        verts, nodes = _search_dp(pts)
    else:
        verts, nodes = _search_exhaustive(pts)
    elapsed = time.perf_counter() - t0
    if verts is None:
        return SearchResult(None, 0, strategy, nodes, elapsed, window)
    poly = Polygon(tuple(verts))
    report = verify_empty(poly.vertices, window.grid)
    if not report.empty:
        raise HellyGridError(f"search produced a polygon that is not empty: {report.describe()}")
    return SearchResult(poly, len(poly), strategy, nodes, elapsed, window)


@dataclass(frozen=True)
class ProbeResult:
    search: SearchResult
    bound: int
    within_bound: bool


def complement_bound_probe(window: GridWindow, strategy: str = "dp", cap=None) -> ProbeResult:
    """Search a complement window and test the result against the 8*f(2) = 24 bound."""
    if window.kind not in COMPLEMENT_KINDS:
        raise ValueError("complement_bound_probe needs a (Z\\P)^2 or Z^2\\P^2 window")
    result = largest_empty_convex_polygon(window, strategy, cap)
    bound = flatness_vertex_bound(FLATNESS_F2)
    ok = result.vertex_count <= bound
    if not ok:
        log.critical(
            "CRITICAL: empty %d-gon in %s exceeds the vertex bound %d: %s",
            result.vertex_count,
            window.kind,
            bound,
            result.best,
        )
    return ProbeResult(result, bound, ok)
