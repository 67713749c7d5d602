"""Empty convex polygons and Helly-number certificates for discrete grids."""

from .emptiness import (
    EmptinessCertificate,
    EmptinessReport,
    IntMinusPrimeSquareGrid,
    ProductGrid,
    construct_diagonal_polygon,
    flatness_vertex_bound,
    make_certificate,
    verify_certificate,
    verify_empty,
    verify_empty_bruteforce,
)
from .exactgeo import GridPoint, Location, Polygon, convex_hull, orientation, point_in_polygon
from .gapscan import Direction, RatioRun, is_admissible, ratio_compare, scan_runs
from .maxsearch import complement_bound_probe, largest_empty_convex_polygon, materialize_window
from .seqgen import Sequence, primes_up_to

__version__ = "0.1.0"
