"""One-dimensional integer sequences whose Cartesian squares are the grids we study.

Every generator returns a :class:`Sequence`: an immutable, strictly
increasing tuple of Python ints tagged with the rule that produced it.
Primes come from a segmented sieve of Eratosthenes so that ranges up to
``10**9`` can be streamed with a bounded memory footprint.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import (
    EmptyRangeError,
    InvertedRangeError,
    MonotonicityError,
    ResourceError,
    SequenceParseError,
)

KINDS = (
    "primes",
    "composites",
    "exponential",
    "fibonacci",
    "doubly_exponential",
    "file",
    "custom",
)

DOUBLY_EXPONENTIAL_CAP = 20
DEFAULT_SEGMENT = 1 << 22


@dataclass(frozen=True, eq=False)
class Sequence:
    kind: str
    elements: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        els = self.elements
        for i in range(len(els) - 1):
            if not els[i] < els[i + 1]:
                raise MonotonicityError(
                    f"elements not strictly increasing at index {i + 1}", index=i + 1
                )

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __repr__(self):
        head = ", ".join(str(e) for e in self.elements[:6])
        more = ", ..." if len(self.elements) > 6 else ""
        return f"Sequence(kind={self.kind!r}, params={self.params!r}, [{head}{more}], n={len(self)})"


def custom(values: Iterable[int]) -> Sequence:
    return Sequence("custom", tuple(int(v) for v in values))


# --- primes -----------------------------------------------------------------


def _small_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in the half-open window [lo, hi) using base primes <= sqrt(hi)."""
    flags = np.ones(hi - lo, dtype=bool)
    if lo < 2:
        flags[: 2 - lo] = False
    for p in base.tolist():
        pp = p * p
        if pp >= hi:
            break
        start = max(pp, -(-lo // p) * p)
        flags[start - lo :: p] = False
    return np.flatnonzero(flags).astype(np.int64) + lo


def default_workers() -> int:
    try:
        n = int(os.environ.get("HELLY_GRID_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


def iter_prime_segments(
    lo: int, hi: int, segment: int = DEFAULT_SEGMENT, workers: int | None = None
) -> Iterator[np.ndarray]:
    """Yield int64 arrays of the primes in [lo, hi], in increasing order.

    Segments may be sieved by a thread pool; ``Executor.map`` keeps the
    output order fixed, so the stream does not depend on ``workers``.
    """
    lo = max(lo, 2)
    if hi < lo:
        return
    if hi >= 2**62:
        raise ResourceError("segmented sieve is limited to values below 2**62")
    base = _small_sieve(math.isqrt(hi) + 1)
    starts = range(lo, hi + 1, segment)

    def job(s):
        return _sieve_segment(s, min(s + segment, hi + 1), base)

    workers = default_workers() if workers is None else workers
    if workers <= 1:
        for s in starts:
            yield job(s)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # bounded look-ahead keeps memory flat for very long ranges
        window = workers * 2
        starts = list(starts)
        for i in range(0, len(starts), window):
            yield from pool.map(job, starts[i : i + window])


def is_prime(n: int) -> bool:
    """Deterministic trial-division membership test, independent of the sieve."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _collect(segments: Iterable[np.ndarray]) -> tuple:
    parts = [s for s in segments if s.size]
    if not parts:
        return ()
    return tuple(np.concatenate(parts).tolist())


def primes_up_to(limit: int, workers: int | None = None) -> Sequence:
    if limit < 2:
        raise EmptyRangeError(f"no primes up to {limit}")
    els = _collect(iter_prime_segments(2, limit, workers=workers))
    return Sequence("primes", els, {"limit": limit})


def primes_in_range(lo: int, hi: int, workers: int | None = None) -> Sequence:
    if hi < lo:
        raise InvertedRangeError(f"inverted range [{lo}, {hi}]")
    if lo < 2:
        raise EmptyRangeError("primes_in_range requires lo >= 2")
    els = _collect(iter_prime_segments(lo, hi, workers=workers))
    return Sequence("primes", els, {"lo": lo, "hi": hi})


def prime_flags(lo: int, hi: int) -> np.ndarray:
    """Boolean array ``f`` with ``f[i]`` true iff ``lo + i`` is prime."""
    flags = np.zeros(hi - lo + 1, dtype=bool)
    for seg in iter_prime_segments(lo, hi):
        flags[seg - lo] = True
    return flags


def composites_in_range(lo: int, hi: int) -> Sequence:
    """Every integer in [lo, hi] that is not prime; 0, 1 and negatives included."""
    if hi < lo:
        raise InvertedRangeError(f"inverted range [{lo}, {hi}]")
    flags = prime_flags(lo, hi)
    els = tuple((np.flatnonzero(~flags) + lo).tolist())
    return Sequence("composites", els, {"lo": lo, "hi": hi})


# --- closed-form families ---------------------------------------------------


def exponential(base: int, count: int) -> Sequence:
    if base < 2:
        raise ValueError("exponential sequences need base >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    els = []
    v = 1
    for _ in range(count):
        v *= base
        els.append(v)
    return Sequence("exponential", tuple(els), {"base": base, "count": count})


def fibonacci(count: int) -> Sequence:
    """First ``count`` distinct Fibonacci numbers: 1, 2, 3, 5, 8, ..."""
    if count < 1:
        raise ValueError("count must be >= 1")
    els = [1]
    a, b = 1, 2
    while len(els) < count:
        els.append(b)
        a, b = b, a + b
    return Sequence("fibonacci", tuple(els), {"count": count})


def doubly_exponential(base: int, count: int) -> Sequence:
    """``base**(2**i)`` for i = 1..count."""
    if base < 2:
        raise ValueError("doubly exponential sequences need base >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > DOUBLY_EXPONENTIAL_CAP:
        raise ResourceError(
            f"doubly exponential count {count} exceeds cap {DOUBLY_EXPONENTIAL_CAP}"
        )
    els = []
    v = base
    for _ in range(count):
        v = v * v
        els.append(v)
    return Sequence("doubly_exponential", tuple(els), {"base": base, "count": count})


def negate_reverse(seq: Sequence) -> Sequence:
    """Map a_1 < ... < a_n to -a_n < ... < -a_1; the gap list is reversed."""
    els = tuple(-e for e in reversed(seq.elements))
    params = dict(seq.params)
    params["negated"] = not params.get("negated", False)
    if not params["negated"]:
        del params["negated"]
    return Sequence(seq.kind, els, params)


# --- file format -------------------------------------------------------------


def parse_sequence(lines: Iterable[str]) -> tuple:
    els = []
    prev_line = None
    for lineno, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            v = int(text, 10)
        except ValueError:
            raise SequenceParseError(f"not a decimal integer: {text!r}", line=lineno) from None
        if els and v <= els[-1]:
            raise MonotonicityError(
                f"{v} does not exceed previous value {els[-1]} (line {prev_line})",
                index=len(els),
                line=lineno,
            )
        els.append(v)
        prev_line = lineno
    return tuple(els)


def from_file(path) -> Sequence:
    path = Path(path)
    with path.open() as fh:
        els = parse_sequence(fh)
    if not els:
        raise EmptyRangeError(f"{path}: no values")
    return Sequence("file", els, {"path": str(path)})


def write_sequence(values: Iterable[int], fh) -> int:
    n = 0
    for v in values:
        fh.write(f"{v}\n")
        n += 1
    return n


def to_file(seq: Sequence, path) -> None:
    with Path(path).open("w") as fh:
        write_sequence(seq.elements, fh)
