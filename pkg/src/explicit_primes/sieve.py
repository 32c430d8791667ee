"""Exact prime arithmetic: segmented sieves, Chebyshev functions, checkpoints.

Everything here is exact integer work except theta/psi, which sum
``log p`` in double precision per segment and merge the partial sums
pairwise. Long ranges are cut into fixed work units, so results do not
depend on how many threads process them.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import _kernels as K
from .errors import CapacityError, CoverageError, DomainError, ParseError, ValidationError

RANGE_CAP = 10**16
DEFAULT_SEGMENT = 17 * K.WHEEL_PERIOD  # odd entries per segment (~255 KB)
UNIT_SPAN = 1 << 27  # integers per independent work unit

_DEFAULT_THREADS = None


def set_default_threads(n: int | None) -> None:
    """Cap worker threads for every sieve call that does not pass ``threads``."""
    global _DEFAULT_THREADS
    _DEFAULT_THREADS = n


def _threads(threads):
    n = threads if threads is not None else _DEFAULT_THREADS
    return max(1, n if n is not None else (os.cpu_count() or 1))


def _check_cap(hi):
    if hi > RANGE_CAP:
        raise CapacityError(f"upper limit {hi} exceeds sieve range cap {RANGE_CAP}")


def _units(lo: int, hi: int, span: int = UNIT_SPAN) -> list[tuple[int, int]]:
    out = []
    a = lo
    while a <= hi:
        b = min(hi, a + span - 1)
        out.append((a, b))
        a = b + 1
    return out


def _map(fn, items, threads):
    n = _threads(threads)
    if n == 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n (n >= 0)."""
    if n < 2 or k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


# --------------------------------------------------------------------------
# prime tables


@dataclass(frozen=True)
class PrimeTable:
    """Primes of ``[range_lo, range_hi]``, sieved lazily segment by segment."""

    range_lo: int
    range_hi: int
    segment_size: int = DEFAULT_SEGMENT
    threads: int | None = field(default=None, compare=False, repr=False)

    def segments(self, span: int = UNIT_SPAN) -> Iterator[np.ndarray]:
        """Yield ascending prime arrays, one per work unit of ``span`` integers."""
        base = K.base_primes(self.range_hi)
        for a, b in _units(self.range_lo, self.range_hi, span):
            yield K.collect_primes(a, b, base, K.PATTERN, self.segment_size)

    @cached_property
    def primes(self) -> np.ndarray:
        base = K.base_primes(self.range_hi)
        parts = _map(
            lambda ab: K.collect_primes(ab[0], ab[1], base, K.PATTERN, self.segment_size),
            _units(self.range_lo, self.range_hi),
            self.threads,
        )
        out = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        out.setflags(write=False)
        return out

    def __len__(self) -> int:
        return int(self.primes.size)

    def __iter__(self):
        return iter(self.primes.tolist())

    def __contains__(self, n) -> bool:
        p = self.primes
        i = np.searchsorted(p, n)
        return bool(i < p.size and p[i] == n)

    def count_upto(self, x) -> int:
        """Number of listed primes not exceeding ``x``."""
        return int(np.searchsorted(self.primes, math.floor(x), side="right"))


def sieve_primes(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT, threads=None) -> PrimeTable:
    """All primes in ``[lo, hi]``."""
    lo, hi = int(lo), int(hi)
    if lo < 2 or hi < lo:
        raise DomainError(f"need 2 <= lo <= hi, got lo={lo}, hi={hi}")
    _check_cap(hi)
    if segment_size < 1:
        raise DomainError("segment_size must be positive")
    return PrimeTable(lo, hi, int(segment_size), threads)


def count_at(lo: int, marks, segment_size: int = DEFAULT_SEGMENT, threads=None) -> np.ndarray:
    """Counts of primes in ``[lo, m]`` for every ``m`` in ascending ``marks``."""
    marks = np.asarray(marks, dtype=np.int64)
    if marks.size == 0:
        return np.zeros(0, dtype=np.int64)
    if np.any(np.diff(marks) < 0):
        raise ValidationError("marks must be ascending")
    lo = max(int(lo), 1)
    hi = int(marks[-1])
    if hi < lo:
        return np.zeros(marks.size, dtype=np.int64)
    _check_cap(hi)
    base = K.base_primes(hi)
    units = _units(lo, hi)

    def work(ab):
        a, b = ab
        local = marks[(marks >= a) & (marks <= b)]
        loc = np.concatenate([local, [b]]).astype(np.int64)
        return K.count_marks(a, loc, base, K.PATTERN, segment_size)

    res = _map(work, units, threads)
    out = np.zeros(marks.size, dtype=np.int64)
    offset = 0
    for (a, b), r in zip(units, res):
        sel = (marks >= a) & (marks <= b)
        out[sel] = r[:-1] + offset
        offset += int(r[-1])
    out[marks < lo] = 0
    return out


def prime_count(lo: int, hi: int, segment_size: int = DEFAULT_SEGMENT, threads=None) -> int:
    """Number of primes in ``[lo, hi]``."""
    lo, hi = int(lo), int(hi)
    if hi < max(lo, 2):
        return 0
    return int(count_at(lo, [hi], segment_size, threads)[0])


def pi(x, segment_size: int = DEFAULT_SEGMENT, threads=None) -> int:
    """The prime-counting function."""
    if x < 0:
        raise DomainError("pi(x) needs x >= 0")
    return prime_count(1, math.floor(x), segment_size, threads)


def _theta_sum(n: int, modulus: int, residue: int, segment_size, threads) -> float:
    if n < 2:
        return 0.0
    _check_cap(n)
    base = K.base_primes(n)
    parts = _map(
        lambda ab: K.theta_partials(ab[0], ab[1], base, K.PATTERN, segment_size, modulus, residue),
        _units(2, n),
        threads,
    )
    # np.sum reduces pairwise
    return float(np.sum(np.concatenate(parts)))


def theta(x, segment_size: int = DEFAULT_SEGMENT, threads=None) -> float:
    """Chebyshev's theta: sum of log p over primes p <= x."""
    if x < 0:
        raise DomainError("theta(x) needs x >= 0")
    return _theta_sum(math.floor(x), 1, 0, segment_size, threads)


def psi(x, segment_size: int = DEFAULT_SEGMENT, threads=None) -> float:
    """Chebyshev's psi, as theta(x) + theta(x^(1/2)) + theta(x^(1/3)) + ..."""
    if x < 0:
        raise DomainError("psi(x) needs x >= 0")
    n = math.floor(x)
    total = 0.0
    k = 1
    while True:
        r = iroot(n, k)
        if r < 2:
            break
        total += _theta_sum(r, 1, 0, segment_size, threads)
        k += 1
    return total


def theta_progression(x, k: int, l: int, segment_size: int = DEFAULT_SEGMENT, threads=None) -> float:
    """Sum of log p over primes p <= x with p = l (mod k)."""
    k, l = int(k), int(l)
    if k < 1 or not 0 <= l < k:
        raise DomainError(f"need k >= 1 and 0 <= l < k, got k={k}, l={l}")
    if x < 0:
        raise DomainError("x must be non-negative")
    return _theta_sum(math.floor(x), k, l, segment_size, threads)


def von_mangoldt(lo: int, hi: int) -> np.ndarray:
    """Lambda(n) for n in [lo, hi] (lo >= 1), as float64."""
    lo, hi = max(int(lo), 1), int(hi)
    out = np.zeros(max(hi - lo + 1, 0), dtype=np.float64)
    if hi < 2:
        return out
    ps = sieve_primes(2, hi).primes
    logs = np.log(ps.astype(np.float64))
    q = ps.copy()
    live = np.ones(ps.size, dtype=bool)
    while live.any():
        sel = live & (q >= lo)
        out[q[sel] - lo] = logs[sel]
        # stop before q * p can overflow or pass hi
        live &= q <= hi // ps
        q = np.where(live, q * ps, q)
    return out


# --------------------------------------------------------------------------
# squarefree numbers


@dataclass(frozen=True)
class SquarefreeSieve:
    """Squarefree flags for the integers of ``[window_lo, window_hi]``."""

    window_lo: int
    window_hi: int
    flags: np.ndarray = field(repr=False)

    def flag(self, n: int) -> bool:
        if not self.window_lo <= n <= self.window_hi:
            raise CoverageError(f"{n} outside window [{self.window_lo}, {self.window_hi}]")
        return bool(self.flags[n - self.window_lo])

    __getitem__ = flag

    def count(self) -> int:
        return int(np.count_nonzero(self.flags))

    def squarefree(self) -> np.ndarray:
        return np.flatnonzero(self.flags) + self.window_lo


def sieve_squarefree(lo: int, hi: int) -> SquarefreeSieve:
    """Cross out multiples of every prime square up to ``hi``; 0 is not squarefree."""
    lo, hi = max(int(lo), 0), int(hi)
    if hi < lo:
        raise DomainError(f"need lo <= hi, got lo={lo}, hi={hi}")
    _check_cap(hi)
    ps = K.small_primes(math.isqrt(hi))
    flags = K.squarefree_flags(lo, hi, ps).view(bool)
    flags.setflags(write=False)
    return SquarefreeSieve(lo, hi, flags)


def is_squarefree(m: int) -> bool:
    """Trial division by q^2 up to the cube root, then a perfect-square test.

    After removing every prime factor q <= m^(1/3), the cofactor has at most
    two prime factors, so it is squarefree unless it is a perfect square.
    """
    m = int(m)
    if m < 1:
        return False
    c = iroot(m, 3)
    r = m
    q = 2
    while q <= c:
        if r % q == 0:
            r //= q
            if r % q == 0:
                return False
        q += 1 if q == 2 else 2
    if r > 1:
        s = math.isqrt(r)
        if s * s == r:
            return False
    return True


def omega(n: int) -> int:
    """Number of distinct prime divisors of ``n``."""
    n = int(n)
    if n < 1:
        raise DomainError("omega(n) needs n >= 1")
    r = n
    count = 0
    limit = math.isqrt(n)
    if limit >= 2:
        ps = K.small_primes(limit)
        for p in ps[(n % ps) == 0].tolist():
            count += 1
            while r % p == 0:
                r //= p
    return count + (1 if r > 1 else 0)


# --------------------------------------------------------------------------
# checkpoint tables


@dataclass(frozen=True)
class CheckpointTable:
    """Exact (x, pi(x)) pairs used to bracket pi between grid points."""

    xs: np.ndarray = field(repr=False)
    pis: np.ndarray = field(repr=False)
    spacing_plan: tuple = ()

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.int64)
        pis = np.asarray(self.pis, dtype=np.int64)
        if xs.shape != pis.shape or xs.ndim != 1 or xs.size == 0:
            raise ValidationError("checkpoint table needs equally long, non-empty columns")
        dx = np.diff(xs)
        dp = np.diff(pis)
        if np.any(dx <= 0):
            i = int(np.flatnonzero(dx <= 0)[0])
            raise ValidationError(f"x not strictly ascending at entry {i + 1}")
        if np.any(dp < 0):
            i = int(np.flatnonzero(dp < 0)[0])
            raise ValidationError(f"pi decreases at entry {i + 1}")
        if np.any(dp > dx):
            i = int(np.flatnonzero(dp > dx)[0])
            raise ValidationError(f"pi jumps by more than x at entry {i + 1}")
        xs.setflags(write=False)
        pis.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "pis", pis)
        if not self.spacing_plan:
            object.__setattr__(self, "spacing_plan", _infer_plan(xs))

    def __len__(self) -> int:
        return int(self.xs.size)

    @property
    def lo(self) -> int:
        return int(self.xs[0])

    @property
    def hi(self) -> int:
        return int(self.xs[-1])

    def covers(self, x) -> bool:
        return self.lo <= x <= self.hi

    def pi_bounds(self, x) -> tuple[int, int]:
        """Interval containing pi(x), from the two surrounding checkpoints.

        Tightened by the fact that at most one of two consecutive integers
        above 2 is prime.
        """
        if not self.covers(x):
            raise CoverageError(f"x={x} outside checkpoint range [{self.lo}, {self.hi}]")
        n = math.floor(x)
        i = int(np.searchsorted(self.xs, n, side="right")) - 1
        xi, pi_i = int(self.xs[i]), int(self.pis[i])
        if xi == n:
            return pi_i, pi_i
        xj, pi_j = int(self.xs[i + 1]), int(self.pis[i + 1])
        return max(pi_i, pi_j - _max_primes(n, xj)), min(pi_j, pi_i + _max_primes(xi, n))

    def save(self, path) -> None:
        lines = ["x,pi"]
        lines.extend(f"{x},{p}" for x, p in zip(self.xs.tolist(), self.pis.tolist()))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _max_primes(a: int, b: int) -> int:
    """Upper bound on the number of primes in (a, b]."""
    if b <= a:
        return 0
    if a >= 2:
        return (b + 1) // 2 - (a + 1) // 2
    return b - a


def _infer_plan(xs: np.ndarray) -> tuple:
    if xs.size < 2:
        return ((int(xs[0]), int(xs[0]), 0),)
    plan = []
    dx = np.diff(xs)
    start = 0
    for i in range(1, dx.size + 1):
        if i == dx.size or dx[i] != dx[start]:
            plan.append((int(xs[start]), int(xs[i]), int(dx[start])))
            start = i
    return tuple(plan)


def _plan_points(plan: Sequence[tuple[int, int, int]]) -> np.ndarray:
    if not plan:
        raise ValidationError("empty spacing plan")
    pts = []
    prev_to = None
    for row, (a, b, s) in enumerate(plan, 1):
        a, b, s = int(a), int(b), int(s)
        if s <= 0 or b <= a:
            raise ValidationError(f"plan row {row}: need from < to and spacing > 0")
        if (b - a) % s:
            raise ValidationError(f"plan row {row}: spacing {s} does not divide {b - a}")
        if prev_to is not None and a != prev_to:
            raise ValidationError(f"plan row {row}: starts at {a}, previous row ended at {prev_to}")
        prev_to = b
        first = a if row == 1 else a + s
        pts.append(np.arange(first, b + 1, s, dtype=np.int64))
    return np.concatenate(pts)


def build_checkpoints(plan, segment_size: int = DEFAULT_SEGMENT, threads=None) -> CheckpointTable:
    """Exact pi at every grid point of a (from, to, spacing) plan."""
    plan = tuple((int(a), int(b), int(s)) for a, b, s in plan)
    xs = _plan_points(plan)
    pis = count_at(1, xs, segment_size, threads)
    return CheckpointTable(xs, pis, plan)


def load_checkpoints(path) -> CheckpointTable:
    """Read a ``x,pi`` CSV written by ``CheckpointTable.save``."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].strip() != "x,pi":
        raise ParseError("expected header 'x,pi'", 1)
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if not body:
        raise ParseError("no entries", 2)
    xs = np.empty(len(body), dtype=np.int64)
    pis = np.empty(len(body), dtype=np.int64)
    for i, ln in enumerate(body):
        parts = ln.split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            xs[i] = int(parts[0])
            pis[i] = int(parts[1])
        except ValueError:
            raise ParseError(f"expected two integers, got {ln!r}", i + 2) from None
    return CheckpointTable(xs, pis)
