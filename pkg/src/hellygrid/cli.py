"""hellygrid command line: sieve -> scan -> construct -> verify -> search.

Exit codes: 0 success/verified, 1 checked and false, 2 usage or format
error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import bisect
import csv
import json
import logging
import sys
from contextlib import contextmanager

from . import seqgen
from .emptiness import (
    ProductGrid,
    check_certificate,
    diagonal_points,
    make_certificate,
    verify_empty,
    verify_empty_bruteforce,
)
from .errors import (
    CertificateFormatError,
    CoverageError,
    HellyGridError,
    ResourceError,
    RunMismatchError,
    SequenceParseError,
    UnknownGridKindError,
    VersionMismatchError,
)
from .gapscan import (
    Direction,
    RatioRun,
    check_doubly_exponential_convexity,
    check_run,
    is_admissible,
    iter_runs,
)
from .maxsearch import complement_bound_probe, largest_empty_convex_polygon, materialize_window

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
RUN_FIELDS = ("start", "length", "direction", "first_element", "last_element")

log = logging.getLogger("hellygrid")


class UsageError(HellyGridError):
    pass


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _open_input(path):
    return sys.stdin if path == "-" else open(path)


def _range(text):
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None


def build_sequence(spec, limit=None, count=None, lo=None, hi=None, workers=None) -> seqgen.Sequence:
    """Materialize a sequence from the compact spec grammar.

    primes, comp, exp:B, fib, dexp:B, file:PATH
    """
    name, _, arg = spec.partition(":")
    if name == "primes":
        if limit is not None:
            return seqgen.primes_up_to(limit, workers=workers)
        if lo is not None and hi is not None:
            return seqgen.primes_in_range(lo, hi, workers=workers)
        raise UsageError("primes needs --limit or --lo/--hi")
    if name in ("comp", "composites"):
        hi = limit if hi is None else hi
        if hi is None:
            raise UsageError("comp needs --hi (or --limit)")
        return seqgen.composites_in_range(0 if lo is None else lo, hi)
    if name == "file":
        if not arg:
            raise UsageError("file:PATH needs a path")
        return seqgen.from_file(arg)
    if count is None:
        raise UsageError(f"{name} needs --count")
    if name == "fib":
        return seqgen.fibonacci(count)
    if name in ("exp", "dexp"):
        try:
            base = int(arg)
        except ValueError:
            raise UsageError(f"{name}:B needs an integer base") from None
        if name == "exp":
            return seqgen.exponential(base, count)
        return seqgen.doubly_exponential(base, count)
    raise UsageError(f"unknown sequence spec {spec!r}")


def _seq_args(p):
    p.add_argument("--seq", required=True, help="primes, comp, exp:B, fib, dexp:B, file:PATH")
    p.add_argument("--limit", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--lo", type=int)
    p.add_argument("--hi", type=int)


def _sequence_from(args):
    return build_sequence(args.seq, args.limit, args.count, args.lo, args.hi, args.workers)


# --- subcommands ---------------------------------------------------------------


def cmd_sieve(args):
    if args.limit < 2:
        raise UsageError("--limit must be >= 2")
    n = 0
    with _output(args.out) as fh:
        for seg in seqgen.iter_prime_segments(2, args.limit, workers=args.workers):
            n += seqgen.write_sequence(seg.tolist(), fh)
    log.info("wrote %d primes <= %d", n, args.limit)
    return EXIT_OK


def _run_chunks(args):
    if args.seq == "primes" and args.limit is not None:
        return seqgen.iter_prime_segments(2, args.limit, workers=args.workers)
    if args.seq == "primes" and args.lo is not None and args.hi is not None:
        return seqgen.iter_prime_segments(args.lo, args.hi, workers=args.workers)
    return [_sequence_from(args).elements]


def cmd_scan(args):
    dirs = [Direction.DECREASING, Direction.INCREASING] if args.direction == "both" else [
        Direction(args.direction)
    ]
    total = 0
    longest = 0
    with _output(args.out) as fh:
        writer = None
        if args.format == "csv":
            writer = csv.DictWriter(fh, fieldnames=RUN_FIELDS, lineterminator="\n")
            writer.writeheader()
        for d in dirs:
            for run in iter_runs(_run_chunks(args), d, args.min_run):
                total += 1
                longest = max(longest, run.length)
                rec = run.to_record()
                if writer:
                    writer.writerow(rec)
                else:
                    fh.write(json.dumps(rec) + "\n")
    log.info("%d runs, longest %d", total, longest)
    return EXIT_OK


def _position_of(seq, value):
    i = bisect.bisect_left(seq.elements, value)
    if i == len(seq) or seq.elements[i] != value:
        raise UsageError(f"{value} is not an element of the sequence")
    return i + 1


def _certify_run(seq, grid, run):
    """Returns (certificate or None, diagnostic text)."""
    try:
        check_run(seq, run)
    except RunMismatchError as exc:
        if exc.index is None:
            return None, f"invalid run: {exc}"
        pts = diagonal_points(seq.elements, run.start, run.length, run.direction)
        report = verify_empty(pts, grid)
        return None, (
            f"ratio condition fails at position {exc.index}: {exc}; "
            f"constructed points: {report.describe()}"
        )
    pts = diagonal_points(seq.elements, run.start, run.length, run.direction)
    report = verify_empty(pts, grid)
    if not report.empty:
        return None, report.describe()
    try:
        brute = verify_empty_bruteforce(pts, grid)
    except ResourceError:
        brute = report
    if brute != report:
        return None, "brute-force verifier disagrees with cross-section verifier"
    return make_certificate(pts, grid, report), report.describe()


def cmd_construct(args):
    seq = _sequence_from(args)
    grid = ProductGrid.from_sequence(seq)
    if args.runs:
        return _construct_many(args, seq, grid)
    if args.k is None or (args.start is None) == (args.index is None):
        raise UsageError("construct needs --k and exactly one of --start VALUE / --index POS")
    pos = args.index if args.index is not None else _position_of(seq, args.start)
    run = RatioRun(pos, args.k, Direction(args.direction))
    cert, msg = _certify_run(seq, grid, run)
    if cert is None:
        print(f"construct: {msg}", file=sys.stderr)
        return EXIT_FALSE
    with _output(args.cert_out) as fh:
        fh.write(cert.to_json(indent=None) + "\n")
    print(
        f"certified empty {cert.implied_helly_lower_bound}-gon ({msg}); "
        f"h >= {cert.implied_helly_lower_bound}",
        file=sys.stderr,
    )
    return EXIT_OK


def _construct_many(args, seq, grid):
    ok = bad = 0
    best = 0
    with _open_input(args.runs) as src, _output(args.cert_out) as fh:
        for lineno, line in enumerate(src, 1):
            if not line.strip():
                continue
            try:
                run = RatioRun.from_record(json.loads(line))
            except (ValueError, KeyError) as exc:
                raise UsageError(f"runs line {lineno}: {exc}") from None
            cert, msg = _certify_run(seq, grid, run)
            if cert is None:
                bad += 1
                print(f"construct: run at {run.start}: {msg}", file=sys.stderr)
                continue
            ok += 1
            best = max(best, cert.implied_helly_lower_bound)
            fh.write(cert.to_json() + "\n")
    print(f"{ok} certified, {bad} failed, best bound {best}", file=sys.stderr)
    return EXIT_OK if bad == 0 else EXIT_FALSE


def _load_certificates(path):
    with _open_input(path) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
        return [data]
    except json.JSONDecodeError:
        pass
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"line {lineno}: invalid JSON: {exc}") from None
    if not out:
        raise CertificateFormatError("no certificate found")
    return out


def cmd_verify(args):
    status = EXIT_OK
    for i, data in enumerate(_load_certificates(args.cert)):
        try:
            check = check_certificate(data)
        except CoverageError as exc:
            print(f"[{i}] FAIL: {exc}")
            status = EXIT_FALSE
            continue
        if check.ok:
            n = len(check.report.hull)
            extra = " (brute-force cross-checked)" if check.bruteforce_checked else ""
            print(f"[{i}] OK: empty {n}-gon, implied Helly lower bound {n}{extra}")
        else:
            status = EXIT_FALSE
            print(f"[{i}] FAIL: " + " | ".join(check.reasons))
    return status


_GRID_KINDS = {
    "primes": ("product", "primes"),
    "composites": ("complement_product", None),
    "comp": ("complement_product", None),
    "int-minus-prime-square": ("int_complement_of_product", None),
}


def cmd_search(args):
    if args.grid in _GRID_KINDS:
        kind, factor = _GRID_KINDS[args.grid]
    else:
        kind = "product"
        factor = build_sequence(args.grid, count=args.count)
    window = materialize_window(kind, args.window, args.ywindow, factor=factor or "primes")
    if kind == "product":
        result = largest_empty_convex_polygon(window, args.strategy, args.cap)
        within = True
    else:
        probe = complement_bound_probe(window, args.strategy, args.cap)
        result, within = probe.search, probe.within_bound
    if result.best is None:
        print(json.dumps({"vertex_count": 0, "search": result.search_block()}))
        print("no empty polygon with >= 3 vertices in window", file=sys.stderr)
        return EXIT_FALSE
    if window.grid.descriptor is None:
        raise UsageError("this grid cannot be certified")
    cert = result.certificate()
    ok = check_certificate(cert).ok
    with _output(args.cert_out) as fh:
        fh.write(cert.to_json() + "\n")
    print(
        f"{args.strategy}: empty {result.vertex_count}-gon in {len(window)} points "
        f"({result.nodes_explored} edges, {result.elapsed:.2f}s); re-verified: {ok}",
        file=sys.stderr,
    )
    if not within:
        print(f"CRITICAL: {result.vertex_count} exceeds the 24-vertex bound", file=sys.stderr)
        return EXIT_FALSE
    return EXIT_OK if ok else EXIT_FALSE


def cmd_admissible(args):
    if args.doubly_exp:
        base, m = args.doubly_exp
        values = seqgen.doubly_exponential(base, m).elements
    else:
        values = args.values
    if not values:
        raise UsageError("give values or --doubly-exp BASE M")
    rep = is_admissible(values)
    out = {
        "admissible": rep.admissible,
        "primes_tested": list(rep.primes_tested),
        "note": rep.note,
    }
    if rep.admissible:
        out["witnesses"] = {str(p): r for p, r in rep.witnesses.items()}
    else:
        out["violating_prime"] = rep.violating_prime
    if args.doubly_exp and len(values) >= 4:
        out["gap_ratios_increasing"] = check_doubly_exponential_convexity(
            base, range(1, len(values) + 1)
        )
    print(json.dumps(out))
    if not rep.admissible:
        print(f"not admissible: every residue class covered mod {rep.violating_prime}", file=sys.stderr)
        return EXIT_FALSE
    return EXIT_OK


# --- entry point ---------------------------------------------------------------


def make_parser():
    ap = argparse.ArgumentParser(prog="hellygrid", description=__doc__.splitlines()[0])
    ap.add_argument("--workers", type=int, default=None, help="default: $HELLY_GRID_THREADS or 1")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="write primes <= limit, one per line")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("scan", help="stream maximal monotone gap-ratio runs")
    _seq_args(p)
    p.add_argument("--direction", choices=["decreasing", "increasing", "both"], default="decreasing")
    p.add_argument("--min-run", type=int, default=4)
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("construct", help="build, verify and certify a near-diagonal polygon")
    _seq_args(p)
    p.add_argument("--start", type=int, help="value of the run's first element")
    p.add_argument("--index", type=int, help="1-based position of the run's first element")
    p.add_argument("--k", type=int, help="number of consecutive elements")
    p.add_argument("--direction", choices=["decreasing", "increasing"], default="decreasing")
    p.add_argument("--runs", help="JSON-lines run file from `scan` ('-' for stdin)")
    p.add_argument("--cert-out", default="-")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="re-verify certificate(s) from scratch")
    p.add_argument("cert", help="certificate JSON or JSON-lines file ('-' for stdin)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", help="largest empty convex polygon in a window")
    p.add_argument("--grid", default="primes", help="primes, composites, int-minus-prime-square, or a sequence spec")
    p.add_argument("--count", type=int, help="element count for exp:B / fib / dexp:B grids")
    p.add_argument("--window", type=_range, required=True, metavar="LO:HI")
    p.add_argument("--ywindow", type=_range, metavar="LO:HI", help="default: same as --window")
    p.add_argument("--strategy", choices=["dp", "exhaustive"], default="dp")
    p.add_argument("--cap", type=int, help="point cap for the chosen strategy")
    p.add_argument("--cert-out", default="-")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("admissible", help="test a set of integers for admissibility")
    p.add_argument("values", nargs="*", type=int)
    p.add_argument("--doubly-exp", nargs=2, type=int, metavar=("BASE", "M"))
    p.set_defaults(func=cmd_admissible)
    return ap


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.workers is None:
        args.workers = seqgen.default_workers()
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"hellygrid: resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (
        UsageError,
        SequenceParseError,
        CertificateFormatError,
        UnknownGridKindError,
        VersionMismatchError,
        ValueError,
        OSError,
    ) as exc:
        print(f"hellygrid: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HellyGridError as exc:
        print(f"hellygrid: {exc}", file=sys.stderr)
        return EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
