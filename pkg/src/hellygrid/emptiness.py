"""Near-diagonal empty polygons, emptiness verification and Helly certificates.

A convex polygon is *empty* in a grid S when its closed region meets S
exactly at its vertices.  An empty n-gon in a discrete set S proves
h(S) >= n, so a certificate is simply a polygon plus enough information
to rebuild the grid and check emptiness again from scratch.
"""

from __future__ import annotations

import bisect
import functools
import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Iterable

from . import seqgen
from .errors import (
    CertificateError,
    CertificateFormatError,
    CoverageError,
    DegenerateHullError,
    ResourceError,
    UnknownGridKindError,
    VersionMismatchError,
)
from .exactgeo import (
    GridPoint,
    Location,
    Polygon,
    as_point,
    column_bounds,
    convex_hull,
    point_in_polygon,
)
from .gapscan import Direction, RatioRun, check_run

CERTIFICATE_VERSION = 1
METHODS = ("cross-section", "bruteforce")
BRUTEFORCE_CAP = 10**7

FLATNESS_F2 = 3
# lattice-width refinement of the complement bound; recorded, not derived here
REFINED_COMPLEMENT_BOUND = 18


def flatness_vertex_bound(f2: int) -> int:
    """Vertex bound 8*f(2) for empty polygons in (Z\\P)^2 and Z^2\\P^2."""
    if f2 < 1:
        raise ValueError("flatness constant must be >= 1")
    return 8 * f2


# --- grids -------------------------------------------------------------------


def _in_bounds(v, lo, hi):
    return (lo is None or v >= lo) and (hi is None or v <= hi)


class ProductGrid:
    """The grid A x A for a strictly increasing factor A, known on [lo, hi].

    ``lo``/``hi`` of None mean the factor is fully known in that direction.
    Queries outside the known range raise :class:`CoverageError`.
    """

    def __init__(self, elements, lo=None, hi=None, descriptor=None):
        self.elements = tuple(elements)
        self.lo = lo
        self.hi = hi
        self.descriptor = descriptor
        self._set = frozenset(self.elements)

    @classmethod
    def from_sequence(cls, seq: seqgen.Sequence, lo=None, hi=None) -> "ProductGrid":
        desc = descriptor_for_sequence(seq)
        dlo, dhi = _descriptor_bounds(desc, seq)
        return cls(seq.elements, dlo if lo is None else lo, dhi if hi is None else hi, desc)

    def covers(self, x0, x1, y0, y1) -> bool:
        return all(_in_bounds(v, self.lo, self.hi) for v in (x0, x1, y0, y1))

    def check_coverage(self, x0, x1, y0, y1):
        if not self.covers(x0, x1, y0, y1):
            raise CoverageError(
                f"box [{x0}, {x1}] x [{y0}, {y1}] exceeds grid bounds [{self.lo}, {self.hi}]"
            )

    def contains(self, pt) -> bool:
        x, y = pt
        self.check_coverage(x, x, y, y)
        return x in self._set and y in self._set

    def axis_members(self, a, b) -> tuple:
        els = self.elements
        return els[bisect.bisect_left(els, a) : bisect.bisect_right(els, b)]

    def xs_in(self, a, b):
        return self.axis_members(a, b)

    def column(self, x, a, b):
        if x not in self._set:
            return ()
        return self.axis_members(a, b)

    def population(self, x0, x1, y0, y1) -> int:
        return len(self.axis_members(x0, x1)) * len(self.axis_members(y0, y1))

    def members_in_box(self, x0, x1, y0, y1):
        ys = self.axis_members(y0, y1)
        for x in self.axis_members(x0, x1):
            for y in ys:
                yield GridPoint(x, y)


class IntMinusPrimeSquareGrid:
    """Z^2 minus P^2 (points with at least one non-prime coordinate) on [lo, hi]^2."""

    def __init__(self, lo, hi):
        if hi < lo:
            raise ValueError("inverted range")
        self.lo = lo
        self.hi = hi
        self._prime = seqgen.prime_flags(lo, hi)
        self.descriptor = {"kind": "int_minus_prime_square", "lo": str(lo), "hi": str(hi)}

    def covers(self, x0, x1, y0, y1) -> bool:
        return all(self.lo <= v <= self.hi for v in (x0, x1, y0, y1))

    check_coverage = ProductGrid.check_coverage

    def is_prime(self, v) -> bool:
        return bool(self._prime[v - self.lo])

    def contains(self, pt) -> bool:
        x, y = pt
        self.check_coverage(x, x, y, y)
        return not (self.is_prime(x) and self.is_prime(y))

    def xs_in(self, a, b):
        return range(max(a, self.lo), min(b, self.hi) + 1)

    def column(self, x, a, b):
        ys = range(max(a, self.lo), min(b, self.hi) + 1)
        if not self.is_prime(x):
            return ys
        return [y for y in ys if not self.is_prime(y)]

    def population(self, x0, x1, y0, y1) -> int:
        return max(0, x1 - x0 + 1) * max(0, y1 - y0 + 1)

    def members_in_box(self, x0, x1, y0, y1):
        for x in range(x0, x1 + 1):
            for y in range(y0, y1 + 1):
                if not (self.is_prime(x) and self.is_prime(y)):
                    yield GridPoint(x, y)


# --- descriptors -------------------------------------------------------------


def _s(v):
    return str(v)


def descriptor_for_sequence(seq: seqgen.Sequence) -> dict:
    p = seq.params
    if p.get("negated") or seq.kind in ("file", "custom"):
        return {"kind": "custom", "elements": [_s(e) for e in seq.elements]}
    if seq.kind == "primes":
        if "limit" in p:
            return {"kind": "primes", "limit": _s(p["limit"])}
        return {"kind": "primes", "lo": _s(p["lo"]), "hi": _s(p["hi"])}
    if seq.kind == "composites":
        return {"kind": "composites", "lo": _s(p["lo"]), "hi": _s(p["hi"])}
    if seq.kind in ("exponential", "doubly_exponential"):
        return {"kind": seq.kind, "base": _s(p["base"]), "count": _s(p["count"])}
    if seq.kind == "fibonacci":
        return {"kind": "fibonacci", "count": _s(p["count"])}
    raise UnknownGridKindError(f"no descriptor for sequence kind {seq.kind!r}")


def _descriptor_bounds(desc, seq):
    kind = desc["kind"]
    if kind == "primes" and "limit" in desc:
        return None, int(desc["limit"])
    if kind in ("primes", "composites", "int_minus_prime_square"):
        return int(desc["lo"]), int(desc["hi"])
    if kind in ("exponential", "doubly_exponential", "fibonacci"):
        return None, seq.elements[-1]
    return None, None


def _int_param(desc, key):
    try:
        return int(desc[key])
    except KeyError:
        raise CertificateFormatError(f"grid descriptor missing {key!r}") from None
    except (TypeError, ValueError):
        raise CertificateFormatError(f"grid parameter {key!r} is not an integer") from None


def grid_from_descriptor(desc: dict):
    """Regenerate a grid from its descriptor; never trusts stored elements beyond 'custom'.

    The last few regenerated grids are cached, keyed by canonical descriptor
    JSON, so a stream of certificates over one grid sieves once.
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise CertificateFormatError("grid descriptor must be an object with a 'kind'")
    try:
        key = json.dumps(desc, sort_keys=True, separators=(",", ":"))
    except (TypeError, ValueError):
        raise CertificateFormatError("grid descriptor is not JSON-serializable") from None
    return _regenerate(key)


@functools.lru_cache(maxsize=4)
def _regenerate(key):
    desc = json.loads(key)
    kind = desc["kind"]
    if kind == "int_minus_prime_square":
        return IntMinusPrimeSquareGrid(_int_param(desc, "lo"), _int_param(desc, "hi"))
    if kind == "primes":
        if "limit" in desc:
            seq = seqgen.primes_up_to(_int_param(desc, "limit"))
        else:
            lo, hi = _int_param(desc, "lo"), _int_param(desc, "hi")
            seq = seqgen.primes_in_range(max(lo, 2), hi) if hi >= 2 else seqgen.custom([])
    elif kind == "composites":
        seq = seqgen.composites_in_range(_int_param(desc, "lo"), _int_param(desc, "hi"))
    elif kind == "exponential":
        seq = seqgen.exponential(_int_param(desc, "base"), _int_param(desc, "count"))
    elif kind == "doubly_exponential":
        seq = seqgen.doubly_exponential(_int_param(desc, "base"), _int_param(desc, "count"))
    elif kind == "fibonacci":
        seq = seqgen.fibonacci(_int_param(desc, "count"))
    elif kind == "custom":
        try:
            seq = seqgen.custom(int(v) for v in desc["elements"])
        except (KeyError, TypeError, ValueError):
            raise CertificateFormatError("custom grid needs an integer 'elements' list") from None
    else:
        raise UnknownGridKindError(f"unknown grid kind {kind!r}")
    lo, hi = _descriptor_bounds(desc, seq)
    return ProductGrid(seq.elements, lo, hi, dict(desc))


# --- construction ------------------------------------------------------------


def diagonal_points(elements, start: int, length: int, direction=Direction.DECREASING):
    """Near-diagonal point set for ``length`` elements from 1-based ``start``.

    Returns (a_t, a_t), the chain (a_i, a_{i+1}) for t <= i <= t+k-2, then
    (a_{t+1}, a_{t+1}): k + 1 points.  Increasing runs are reflected in y = x.
    No validity checks.
    """
    els = list(elements[start - 1 : start - 1 + length])
    if len(els) != length or length < 2:
        raise ValueError("window does not fit the sequence")
    pts = [GridPoint(els[0], els[0])]
    pts += [GridPoint(els[i], els[i + 1]) for i in range(length - 1)]
    pts.append(GridPoint(els[1], els[1]))
    if Direction(direction) is Direction.INCREASING:
        pts = [GridPoint(p.y, p.x) for p in pts]
    return pts


def construct_diagonal_polygon(seq: seqgen.Sequence, run: RatioRun) -> list[GridPoint]:
    """Candidate empty polygon for a ratio run; raises RunMismatchError on a bad run."""
    check_run(seq, run)
    return diagonal_points(seq.elements, run.start, run.length, run.direction)


# --- verification ------------------------------------------------------------


@dataclass(frozen=True)
class EmptinessReport:
    empty: bool
    violations: tuple  # ((GridPoint, Location), ...) sorted by point
    sections_checked: int
    vertices_in_grid: bool
    convex_position: bool
    hull: Polygon | None = field(default=None, compare=False)

    def describe(self) -> str:
        if self.empty:
            return f"empty: {len(self.hull)} vertices, {self.sections_checked} sections checked"
        bits = []
        if not self.vertices_in_grid:
            bits.append("vertices not all in grid")
        if not self.convex_position:
            bits.append("points not in strictly convex position")
        for pt, loc in self.violations:
            bits.append(f"({pt.x}, {pt.y}) {loc.value}")
        return "not empty: " + "; ".join(bits)


def _prepare(points, grid):
    pts = [as_point(p) for p in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    xs = [p.x for p in pts]
    ys = [p.y for p in pts]
    box = (min(xs), max(xs), min(ys), max(ys))
    grid.check_coverage(*box)
    in_grid = all(grid.contains(p) for p in pts)
    try:
        hull = convex_hull(pts)
    except DegenerateHullError:
        return pts, box, in_grid, None, False
    convex = len(hull) == len(pts) and set(hull.vertices) == set(pts)
    return pts, box, in_grid, hull, convex


def _finish(violations, sections, in_grid, hull, convex):
    violations = tuple(sorted(violations))
    empty = convex and in_grid and not violations
    return EmptinessReport(empty, violations, sections, in_grid, convex, hull)


def verify_empty(points: Iterable, grid) -> EmptinessReport:
    """Check emptiness column by column over the polygon's exact vertical slices."""
    pts, box, in_grid, hull, convex = _prepare(points, grid)
    if hull is None:
        return _finish((), 0, in_grid, None, False)
    verts = set(hull.vertices)
    violations = []
    sections = 0
    for x in grid.xs_in(box[0], box[1]):
        sections += 1
        lo, hi = column_bounds(hull, x)
        if lo > hi:
            continue
        for y in grid.column(x, lo, hi):
            pt = GridPoint(x, y)
            if pt not in verts:
                violations.append((pt, point_in_polygon(pt, hull)))
    return _finish(violations, sections, in_grid, hull, convex)


def verify_empty_bruteforce(points: Iterable, grid, cap: int = BRUTEFORCE_CAP) -> EmptinessReport:
    """Independent check: classify every grid point of the bounding box."""
    pts, box, in_grid, hull, convex = _prepare(points, grid)
    if grid.population(*box) > cap:
        raise ResourceError(f"bounding box holds more than {cap} grid points")
    if hull is None:
        return _finish((), 0, in_grid, None, False)
    verts = set(hull.vertices)
    violations = []
    for pt in grid.members_in_box(*box):
        if pt in verts:
            continue
        loc = point_in_polygon(pt, hull)
        if loc is not Location.OUTSIDE:
            violations.append((pt, loc))
    sections = len(grid.xs_in(box[0], box[1]))
    return _finish(violations, sections, in_grid, hull, convex)


# --- certificates ------------------------------------------------------------


@dataclass(frozen=True)
class EmptinessCertificate:
    grid: dict
    vertices: tuple
    hull_ccw: tuple
    empty: bool
    implied_helly_lower_bound: int
    method: str = "cross-section"
    version: int = CERTIFICATE_VERSION
    search: dict | None = None
    digest: str | None = None

    def core(self) -> dict:
        d = {
            "version": self.version,
            "grid": self.grid,
            "vertices": [GridPoint.to_json(v) for v in self.vertices],
            "hull_ccw": list(self.hull_ccw),
            "method": self.method,
            "empty": self.empty,
            "implied_helly_lower_bound": self.implied_helly_lower_bound,
        }
        if self.search is not None:
            d["search"] = self.search
        return d

    def compute_digest(self) -> str:
        blob = json.dumps(self.core(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def sealed(self) -> "EmptinessCertificate":
        return replace(self, digest=self.compute_digest())

    def to_dict(self) -> dict:
        d = self.core()
        d["digest"] = self.digest
        return d

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, d) -> "EmptinessCertificate":
        if not isinstance(d, dict):
            raise CertificateFormatError("certificate must be a JSON object")
        if "version" not in d:
            raise CertificateFormatError("certificate has no version")
        if d["version"] != CERTIFICATE_VERSION or isinstance(d["version"], bool):
            raise VersionMismatchError(
                f"certificate version {d['version']!r}, expected {CERTIFICATE_VERSION}"
            )
        try:
            verts = tuple(GridPoint.from_json(v) for v in d["vertices"])
            hull = tuple(d["hull_ccw"])
            if not all(type(i) is int for i in hull):
                raise TypeError("hull indices")
            bound = d["implied_helly_lower_bound"]
            if type(bound) is not int:
                raise TypeError("bound")
            empty = d["empty"]
            if type(empty) is not bool:
                raise TypeError("empty flag")
            return cls(
                grid=d["grid"],
                vertices=verts,
                hull_ccw=hull,
                empty=empty,
                implied_helly_lower_bound=bound,
                method=d["method"],
                version=d["version"],
                search=d.get("search"),
                digest=d.get("digest"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateFormatError(f"malformed certificate: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "EmptinessCertificate":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"invalid JSON: {exc}") from None
        return cls.from_dict(d)


def _hull_order(points, hull: Polygon) -> tuple:
    index = {p: i for i, p in enumerate(points)}
    return tuple(index[v] for v in hull.vertices)


def make_certificate(points, grid, report: EmptinessReport, method="cross-section", search=None):
    if not report.empty:
        raise CertificateError("refusing to certify a polygon that is not empty: " + report.describe())
    if grid.descriptor is None:
        raise CertificateError("grid has no descriptor; cannot be regenerated")
    pts = tuple(as_point(p) for p in points)
    return EmptinessCertificate(
        grid=dict(grid.descriptor),
        vertices=pts,
        hull_ccw=_hull_order(pts, report.hull),
        empty=True,
        implied_helly_lower_bound=len(pts),
        method=method,
        search=search,
    ).sealed()


@dataclass
class CertificateCheck:
    ok: bool
    reasons: list
    report: EmptinessReport | None = None
    bruteforce_checked: bool = False


def check_certificate(cert, bruteforce_cap: int = BRUTEFORCE_CAP) -> CertificateCheck:
    """Re-verify a certificate from scratch and list everything that fails."""
    if isinstance(cert, str):
        cert = EmptinessCertificate.from_json(cert)
    elif isinstance(cert, dict):
        cert = EmptinessCertificate.from_dict(cert)
    grid = grid_from_descriptor(cert.grid)
    reasons = []
    if cert.digest != cert.compute_digest():
        reasons.append("digest does not match certificate contents")
    if cert.method not in METHODS:
        reasons.append(f"unknown method {cert.method!r}")
    if not cert.empty:
        reasons.append("certificate does not claim emptiness")
    if len(cert.vertices) < 3:
        reasons.append("fewer than 3 vertices")
        return CertificateCheck(False, reasons)
    if cert.implied_helly_lower_bound != len(cert.vertices):
        reasons.append(
            f"implied bound {cert.implied_helly_lower_bound} != vertex count {len(cert.vertices)}"
        )
    report = verify_empty(cert.vertices, grid)
    if not report.empty:
        reasons.append(report.describe())
    elif _hull_order(cert.vertices, report.hull) != tuple(cert.hull_ccw):
        reasons.append("hull_ccw does not match the recomputed hull order")
    brute = False
    try:
        other = verify_empty_bruteforce(cert.vertices, grid, cap=bruteforce_cap)
    except ResourceError:
        other = None
    if other is not None:
        brute = True
        if other != report:
            reasons.append("cross-section and brute-force verifiers disagree")
    return CertificateCheck(not reasons, reasons, report, brute)


def verify_certificate(cert, bruteforce_cap: int = BRUTEFORCE_CAP) -> bool:
    return check_certificate(cert, bruteforce_cap).ok


def certify_points(points, grid, method="cross-section", search=None):
    """Verify and, if empty, certify; returns (report, certificate or None)."""
    report = verify_empty(points, grid)
    cert = make_certificate(points, grid, report, method, search) if report.empty else None
    return report, cert
