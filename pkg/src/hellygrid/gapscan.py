"""Gap sequences, exact gap-ratio comparisons, monotone-run scanning, admissibility.

A run of ``k`` consecutive elements a_t..a_{t+k-1} is *decreasing* when
every consecutive gap triple (g_i, g_{i+1}, g_{i+2}) inside it satisfies
``g_{i+2} * g_i < g_{i+1}**2``, i.e. the ratios g_{i+1}/g_i strictly
decrease.  Comparisons are always made on exact integers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .errors import RunMismatchError, ResourceError
from .seqgen import DOUBLY_EXPONENTIAL_CAP, Sequence, _small_sieve

# int64 holds g2*g0 - g1*g1 exactly while every gap is below this
_FAST_GAP_LIMIT = 2**31
MIN_RUN_LENGTH = 4


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


class Direction(str, enum.Enum):
    DECREASING = "decreasing"
    INCREASING = "increasing"

    @property
    def sign(self) -> int:
        return -1 if self is Direction.DECREASING else 1


@dataclass(frozen=True)
class GapList:
    source: Sequence
    gaps: tuple

    def __len__(self):
        return len(self.gaps)


@dataclass(frozen=True)
class RatioRun:
    """``length`` consecutive elements starting at 1-based position ``start``."""

    start: int
    length: int
    direction: Direction
    first_element: int | None = field(default=None, compare=False)
    last_element: int | None = field(default=None, compare=False)

    @property
    def stop(self) -> int:
        """1-based position of the last element."""
        return self.start + self.length - 1

    def to_record(self) -> dict:
        return {
            "start": self.start,
            "length": self.length,
            "direction": self.direction.value,
            "first_element": str(self.first_element),
            "last_element": str(self.last_element),
        }

    @classmethod
    def from_record(cls, rec: dict) -> "RatioRun":
        first = rec.get("first_element")
        last = rec.get("last_element")
        return cls(
            int(rec["start"]),
            int(rec["length"]),
            Direction(rec["direction"]),
            None if first in (None, "None") else int(first),
            None if last in (None, "None") else int(last),
        )


@dataclass(frozen=True)
class AdmissibilityReport:
    admissible: bool
    witnesses: dict
    violating_prime: int | None
    primes_tested: tuple
    note: str = (
        "only primes p <= m are tested: m distinct values occupy at most m "
        "residue classes, so they cannot cover all p classes when p > m"
    )


def gaps(seq) -> GapList:
    els = seq.elements if isinstance(seq, Sequence) else tuple(seq)
    if len(els) < 2:
        raise ValueError("a gap list needs at least two elements")
    src = seq if isinstance(seq, Sequence) else Sequence("custom", els)
    return GapList(src, tuple(b - a for a, b in zip(els, els[1:])))


def ratio_compare(g0: int, g1: int, g2: int) -> Ordering:
    """Compare g2/g1 against g1/g0 by cross-multiplication."""
    if g0 < 1 or g1 < 1 or g2 < 1:
        raise ValueError("gaps must be positive")
    d = g2 * g0 - g1 * g1
    return Ordering.LESS if d < 0 else Ordering.GREATER if d > 0 else Ordering.EQUAL


def comparison_signs(gap_values) -> np.ndarray:
    """sign(g[i+2]*g[i] - g[i+1]**2) for every consecutive triple, as int8."""
    n = len(gap_values) - 2
    if n <= 0:
        return np.zeros(0, dtype=np.int8)
    if isinstance(gap_values, np.ndarray) and gap_values.dtype.kind == "i":
        arr = gap_values.astype(np.int64, copy=False)
        if arr.max() < _FAST_GAP_LIMIT:
            return np.sign(arr[2:] * arr[:-2] - arr[1:-1] * arr[1:-1]).astype(np.int8)
        gap_values = arr.tolist()
    g = list(gap_values)
    if max(g) < _FAST_GAP_LIMIT:
        return comparison_signs(np.asarray(g, dtype=np.int64))
    out = np.empty(n, dtype=np.int8)
    for i in range(n):
        d = g[i + 2] * g[i] - g[i + 1] * g[i + 1]
        out[i] = -1 if d < 0 else (1 if d > 0 else 0)
    return out


def _as_chunk(chunk):
    if isinstance(chunk, np.ndarray):
        return chunk
    chunk = list(chunk)
    if chunk and max(abs(chunk[0]), abs(chunk[-1])) < 2**62:
        return np.asarray(chunk, dtype=np.int64)
    return chunk


def _chunk_gaps(chunk):
    if isinstance(chunk, np.ndarray):
        return np.diff(chunk)
    return [b - a for a, b in zip(chunk, chunk[1:])]


def iter_runs(
    chunks: Iterable, direction: Direction | str, min_length: int = MIN_RUN_LENGTH
) -> Iterator[RatioRun]:
    """Stream maximal runs over a sequence delivered in consecutive chunks.

    ``chunks`` yields pieces (numpy int arrays or lists of ints) whose
    concatenation is strictly increasing.  Three trailing elements are
    carried across every seam so no comparison is lost or duplicated.
    """
    direction = Direction(direction)
    if min_length < MIN_RUN_LENGTH:
        raise ValueError(f"min_length must be >= {MIN_RUN_LENGTH}")
    want = direction.sign
    carry: list = []  # trailing <= 3 elements of everything seen so far
    offset = 0  # 0-based global position of block[0]
    run_start = None  # 0-based global comparison index opening the current run
    run_first = None
    last_hit = None  # (global comparison index, last element it covers)

    def close():
        length = last_hit[0] - run_start + 4
        if length >= min_length:
            return RatioRun(run_start + 1, length, direction, run_first, last_hit[1])
        return None

    for raw in chunks:
        chunk = _as_chunk(raw)
        if len(chunk) == 0:
            continue
        if isinstance(chunk, np.ndarray):
            block = np.concatenate([np.asarray(carry, dtype=np.int64), chunk]) if carry else chunk
            ok = len(block) < 2 or bool(np.all(np.diff(block) > 0))
        else:
            block = carry + chunk
            ok = all(a < b for a, b in zip(block, block[1:]))
        if not ok:
            raise ValueError("chunks are not strictly increasing")
        if len(block) >= 4:
            hits = comparison_signs(_chunk_gaps(block)) == want
            padded = np.concatenate(([False], hits, [False]))
            edges = np.flatnonzero(padded[1:] != padded[:-1])
            for s, e in zip(edges[0::2].tolist(), (edges[1::2] - 1).tolist()):
                gs = offset + s
                if run_start is None or gs != last_hit[0] + 1:
                    if run_start is not None:
                        r = close()
                        if r is not None:
                            yield r
                    run_start, run_first = gs, int(block[s])
                last_hit = (offset + e, int(block[e + 3]))
            if run_start is not None and last_hit[0] < offset + len(hits) - 1:
                r = close()
                run_start = None
                if r is not None:
                    yield r
        keep = min(3, len(block))
        offset += len(block) - keep
        carry = [int(v) for v in block[len(block) - keep :]]
    if run_start is not None:
        r = close()
        if r is not None:
            yield r


def scan_runs(
    seq: Sequence, direction: Direction | str, min_length: int = MIN_RUN_LENGTH
) -> list[RatioRun]:
    """All maximal runs of the requested direction, ordered by start."""
    return list(iter_runs([seq.elements], direction, min_length))


def check_run(seq: Sequence, run: RatioRun) -> None:
    """Raise RunMismatchError unless ``run`` satisfies its inequality chain on ``seq``.

    The error's ``index`` is the 1-based position of the first element of
    the failing gap triple.
    """
    if run.length < MIN_RUN_LENGTH:
        raise RunMismatchError(f"run length {run.length} < {MIN_RUN_LENGTH}")
    if run.start < 1 or run.stop > len(seq):
        raise RunMismatchError(
            f"run positions {run.start}..{run.stop} outside sequence of length {len(seq)}"
        )
    els = seq.elements[run.start - 1 : run.stop]
    if run.first_element is not None and run.first_element != els[0]:
        raise RunMismatchError(f"run first element {run.first_element} != {els[0]}")
    if run.last_element is not None and run.last_element != els[-1]:
        raise RunMismatchError(f"run last element {run.last_element} != {els[-1]}")
    g = [b - a for a, b in zip(els, els[1:])]
    want = Ordering(run.direction.sign)
    for i in range(len(g) - 2):
        got = ratio_compare(g[i], g[i + 1], g[i + 2])
        if got is not want:
            raise RunMismatchError(
                f"gap triple ({g[i]}, {g[i + 1]}, {g[i + 2]}) at position "
                f"{run.start + i} compares {got.name}, needs {want.name}",
                index=run.start + i,
            )


def is_admissible(values: Iterable[int]) -> AdmissibilityReport:
    vals = [int(v) for v in values]
    if not vals:
        raise ValueError("admissibility needs a nonempty set")
    if len(set(vals)) != len(vals):
        raise ValueError("values must be distinct")
    tested = tuple(_small_sieve(len(vals)).tolist())
    witnesses = {}
    for p in tested:
        hit = {v % p for v in vals}
        missing = next((r for r in range(p) if r not in hit), None)
        if missing is None:
            return AdmissibilityReport(False, {}, p, tested)
        witnesses[p] = missing
    return AdmissibilityReport(True, witnesses, None, tested)


def check_doubly_exponential_convexity(base: int, subset: Iterable[int]) -> bool:
    """True iff base**(2**r) over the chosen indices has strictly increasing gap ratios."""
    idx = list(subset)
    if len(idx) < MIN_RUN_LENGTH:
        raise ValueError(f"need at least {MIN_RUN_LENGTH} indices")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise ValueError("indices must be strictly increasing")
    if idx[0] < 1:
        raise ValueError("indices start at 1")
    if idx[-1] > DOUBLY_EXPONENTIAL_CAP:
        raise ResourceError(f"index {idx[-1]} exceeds cap {DOUBLY_EXPONENTIAL_CAP}")
    els = [base ** (2**r) for r in idx]
    g = [b - a for a, b in zip(els, els[1:])]
    return all(
        ratio_compare(g[i], g[i + 1], g[i + 2]) is Ordering.GREATER for i in range(len(g) - 2)
    )
