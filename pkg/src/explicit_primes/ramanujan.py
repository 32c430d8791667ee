"""Exact and checkpoint-driven checks of pi(x)^2 < (e x / log x) pi(x/e).

Write f(x) = pi(x)^2 - (e x / log x) pi(x/e). A counterexample is an x
with f(x) >= 0. Two facts drive everything below:

* f only jumps up at primes, which are integers, and is decreasing
  everywhere else (pi(x/e) only steps up and e x / log x increases).
  So f < 0 at every integer of [a, b] gives f < 0 on all of [a, b + 1).
* From one evaluation f(x0) < 0 the stepping bound
  f(x0 + eps) <= f(x0) + 2 pi(x0) eps + eps^2 certifies a whole stretch.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numba import njit

from . import _kernels as K
from . import sieve
from .errors import CoverageError, DomainError, ValidationError

E = math.e
REL_SLACK = 1e-12  # covers double rounding in pi^2 and (e x / log x) pi(x/e)
LARGEST_COUNTEREXAMPLE = 38_358_837_682
LARGEST_PRIME_COUNTEREXAMPLE = 38_358_837_677



def _mpf(v):
    with mpmath.workdps(40):
        return mpmath.mpf(v)


def floor_div_e(n: int) -> int:
    """floor(n / e) for an integer n, exact (40-digit arithmetic)."""
    with mpmath.workdps(40):
        return int(mpmath.floor(mpmath.mpf(int(n)) / mpmath.e))


def ceil_mul_e(q: int) -> int:
    """Smallest integer x with floor(x / e) >= q."""
    with mpmath.workdps(40):
        return int(mpmath.ceil(mpmath.mpf(int(q)) * mpmath.e))


def f_from_counts(x, pi_x: int, pi_xe: int) -> float:
    """f(x) from exact counts.

    Double precision settles the sign unless f is within 1e-12 of the
    size of its terms; then pi^2 is taken exactly and the rest to 40 digits.
    """
    a = float(int(pi_x) ** 2)
    b = E * float(x) / math.log(float(x)) * int(pi_xe)
    if abs(a - b) > REL_SLACK * (a + b):
        return a - b
    with mpmath.workdps(40):
        X = mpmath.mpf(int(x)) if isinstance(x, (int, np.integer)) else mpmath.mpf(x)
        rhs = mpmath.e * X / mpmath.log(X) * int(pi_xe)
        return float(int(pi_x) ** 2 - rhs)


@dataclass(frozen=True)
class RamanujanEval:
    """f at one x; intervals are (lo, hi) pairs and equal ends mean exact."""

    x: float
    pi_x: tuple
    pi_x_over_e: tuple
    f_value: tuple
    exactness: str  # "exact" or "table-bracketed"

    @property
    def is_counterexample(self) -> bool:
        return self.f_value[0] >= 0

    @property
    def certified_negative(self) -> bool:
        return self.f_value[1] < 0

    def as_row(self) -> dict:
        return dict(x=self.x, f_interval_lo=self.f_value[0], f_interval_hi=self.f_value[1], mode=self.exactness)


def _exact_eval(x, px, pe) -> RamanujanEval:
    f = f_from_counts(x, px, pe)
    return RamanujanEval(x, (px, px), (pe, pe), (f, f), "exact")


def _args(x):
    if x < E:
        raise DomainError(f"f(x) needs x >= e, got {x}")
    n = math.floor(x)
    ne = floor_div_e(n) if float(x).is_integer() else int(mpmath.floor(_mpf(x) / mpmath.e))
    return n, ne


def _pi_from_table(n: int, table: sieve.CheckpointTable) -> int:
    """Exact pi(n): nearest checkpoint at or below n plus a local sieve."""
    if not table.covers(n):
        raise CoverageError(f"{n} outside checkpoint range [{table.lo}, {table.hi}]")
    i = int(np.searchsorted(table.xs, n, side="right")) - 1
    xi = int(table.xs[i])
    return int(table.pis[i]) + sieve.prime_count(xi + 1, n)


def f_exact(x, table: sieve.CheckpointTable | None = None) -> RamanujanEval:
    """f(x) from exact prime counts.

    With a checkpoint table the counts come from the nearest checkpoint plus
    a short sieve; without one, from a full sieve up to x.
    """
    n, ne = _args(x)
    if table is not None:
        pe = _pi_from_table(ne, table) if table.covers(ne) else sieve.pi(ne)
        return _exact_eval(x, _pi_from_table(n, table), pe)
    c = sieve.count_at(1, sorted({ne, n}))
    px = int(c[-1])
    pe = int(c[0]) if ne != n else px
    return _exact_eval(x, px, pe)


def f_exact_many(xs, threads=None) -> list[RamanujanEval]:
    """``f_exact`` at many points with one sieve pass."""
    args = [_args(x) for x in xs]
    marks = sorted({v for a in args for v in a})
    counts = dict(zip(marks, sieve.count_at(1, marks, threads=threads).tolist()))
    return [_exact_eval(x, counts[n], counts[ne]) for x, (n, ne) in zip(xs, args)]


def f_bracket(x, table: sieve.CheckpointTable) -> RamanujanEval:
    """Interval for f(x) from checkpoint brackets of pi(x) and pi(x/e)."""
    n, ne = _args(x)
    plo, phi = table.pi_bounds(n)
    elo, ehi = table.pi_bounds(ne)
    # f is increasing in pi(x) and decreasing in pi(x/e)
    lo = f_from_counts(x, plo, ehi)
    hi = f_from_counts(x, phi, elo)
    return RamanujanEval(x, (plo, phi), (elo, ehi), (lo, hi), "exact" if lo == hi else "table-bracketed")


def step_epsilon(pi_x0: float, f_x0: float) -> float:
    """Largest eps with f(x0) + 2 pi(x0) eps + eps^2 <= 0, i.e. sqrt(pi^2 - f) - pi.

    Pass the upper ends of bracketed data. Written as -f / (sqrt(pi^2 - f) + pi)
    to avoid cancellation.
    """
    if f_x0 >= 0:
        raise DomainError("cannot step from a point with f >= 0")
    return -f_x0 / (math.sqrt(pi_x0 * pi_x0 - f_x0) + pi_x0)


def step_epsilon_eval(ev: RamanujanEval) -> float:
    return step_epsilon(float(ev.pi_x[1]), ev.f_value[1])


# --------------------------------------------------------------------------
# stepping through a checkpoint table

TIE = 1e-6  # x/e this close to an integer is bracketed on both sides
SAMPLE_EVERY = 100_000


@njit(cache=True)
def _bounds_at(xs, pis, n, i):
    # advance i so that xs[i] <= n < xs[i+1]
    while i + 1 < xs.shape[0] and xs[i + 1] <= n:
        i += 1
    xi = xs[i]
    if xi == n:
        return pis[i], pis[i], i
    xj = xs[i + 1]
    lo = pis[i]
    hi = pis[i + 1]
    # at most one of two consecutive integers above 2 is prime
    up = (n + 1) // 2 - (xi + 1) // 2
    dn = (xj + 1) // 2 - (n + 1) // 2
    if pis[i] + up < hi:
        hi = pis[i] + up
    if pis[i + 1] - dn > lo:
        lo = pis[i + 1] - dn
    return lo, hi, i


@njit(cache=True)
def _step_kernel(xs, pis, x0, hi, i, j, sample_every, max_samples):
    """Step from integer x0 while the checkpoint brackets give f < 0.

    Returns (status, x, steps, nsamples, samples); status 0 = reached hi,
    1 = indeterminate at x.
    """
    samples = np.zeros((max_samples, 4), dtype=np.float64)
    ns = 0
    steps = 0
    x = x0
    e = math.e
    while x <= hi:
        plo, phi, i = _bounds_at(xs, pis, x, i)
        t = x / e
        elo_n = np.int64(math.floor(t - 1e-6))
        ehi_n = np.int64(math.floor(t + 1e-6))
        elo, _, j = _bounds_at(xs, pis, elo_n, j)
        # the second lookup may move past elo_n; brackets only widen upward
        _, ehi, _ = _bounds_at(xs, pis, ehi_n, j)
        w = e * x / math.log(x)
        a = float(phi) * float(phi)
        b = w * float(elo)
        f_hi = a - b + 1e-12 * (a + b)
        if f_hi >= 0:
            return 1, x, steps, ns, samples
        p = float(phi)
        eps = -f_hi / (math.sqrt(p * p - f_hi) + p)
        if steps % sample_every == 0 and ns < max_samples:
            f_lo = float(plo) * float(plo) - w * float(ehi) - 1e-12 * (a + b)
            samples[ns, 0] = x
            samples[ns, 1] = eps
            samples[ns, 2] = f_lo
            samples[ns, 3] = f_hi
            ns += 1
        steps += 1
        # f < 0 on [x, x + eps]; the integer floor(x + eps) is covered, and
        # monotonicity between integers covers the rest of its unit interval
        x = np.int64(math.floor(x + eps)) + 1
    return 0, x, steps, ns, samples


@dataclass(frozen=True)
class SteppingReport:
    lo: int
    hi: int
    certified: bool
    steps: int
    stopped_at: int | None  # first indeterminate x when not certified
    refinements: int
    samples: np.ndarray = field(repr=False)  # rows (x0, eps, f_lo, f_hi)
    witness: RamanujanEval | None = None  # exact evaluation with f >= 0, if one was hit

    @property
    def status(self) -> str:
        if self.certified:
            return "certified"
        return "counterexample" if self.witness is not None else "indeterminate"


def verify_range_stepping(
    lo, hi, table: sieve.CheckpointTable, refine: bool = True, max_refine_gap: int = 10**7,
    sample_every: int = SAMPLE_EVERY, progress=None,
) -> SteppingReport:
    """Certify f < 0 on [lo, hi] by stepping through ``table``.

    Where the brackets cannot decide the sign, the counts are recomputed
    exactly by sieving from the neighbouring checkpoints, provided the
    checkpoint gap is at most ``max_refine_gap``; otherwise the run stops
    and reports the indeterminate x.
    """
    lo_i, hi_i = math.ceil(lo), math.floor(hi)
    if hi_i < lo_i or lo == hi:
        return SteppingReport(lo_i, hi_i, True, 0, None, 0, np.zeros((0, 4)))
    need_lo = floor_div_e(lo_i) - 1
    if not (table.covers(need_lo) and table.covers(hi_i + 1)):
        raise CoverageError(
            f"table [{table.lo}, {table.hi}] must cover [{need_lo}, {hi_i + 1}] for this range"
        )
    xs, pis = np.ascontiguousarray(table.xs), np.ascontiguousarray(table.pis)
    steps = 0
    refinements = 0
    parts = []
    x = lo_i
    max_samples = 1 + (hi_i - lo_i) // max(sample_every, 1) + 16
    while True:
        i0 = max(int(np.searchsorted(xs, x, side="right")) - 1, 0)
        j0 = max(int(np.searchsorted(xs, floor_div_e(x) - 1, side="right")) - 1, 0)
        status, x, n, ns, smp = _step_kernel(
            xs, pis, np.int64(x), np.int64(hi_i), np.int64(i0), np.int64(j0), sample_every, max_samples
        )
        steps += n
        parts.append(smp[:ns])
        if progress:
            progress(f"stepping: {steps} steps, x = {x}")
        if status == 0:
            return SteppingReport(lo_i, hi_i, True, steps, None, refinements, np.concatenate(parts))
        gap = _gap(table, x)
        if not refine or gap > max_refine_gap:
            return SteppingReport(lo_i, hi_i, False, steps, int(x), refinements, np.concatenate(parts))
        ev = f_exact(int(x), table)
        refinements += 1
        if ev.f_value[1] >= 0:
            return SteppingReport(lo_i, hi_i, False, steps, int(x), refinements, np.concatenate(parts), ev)
        eps = step_epsilon_eval(ev)
        steps += 1
        x = int(math.floor(x + eps)) + 1
        if x > hi_i:
            return SteppingReport(lo_i, hi_i, True, steps, None, refinements, np.concatenate(parts))


def _gap(table, x) -> int:
    def g(n):
        i = int(np.searchsorted(table.xs, n, side="right")) - 1
        return 0 if table.xs[i] == n else int(table.xs[i + 1] - table.xs[i])

    return max(g(int(x)), g(floor_div_e(int(x))))


# --------------------------------------------------------------------------
# exhaustive scan


@dataclass(frozen=True)
class ScanResult:
    """Counterexamples as maximal runs of consecutive integers.

    Between two jump points both counts are constant and f is strictly
    decreasing, so every counterexample lies in a run that starts at a jump
    point. Run k covers ``starts[k] .. lasts[k]`` with counts ``pi_x[k]``,
    ``pi_x_over_e[k]``; ``start_is_prime[k]`` marks runs that start at a prime
    (no other member of a run can be prime).
    """

    lo: int
    hi: int
    starts: np.ndarray = field(repr=False)
    lasts: np.ndarray = field(repr=False)
    pi_x: np.ndarray = field(repr=False)
    pi_x_over_e: np.ndarray = field(repr=False)
    start_is_prime: np.ndarray = field(repr=False)
    jump_points: int = 0

    @property
    def count(self) -> int:
        return int(np.sum(self.lasts - self.starts + 1)) if self.starts.size else 0

    @property
    def largest(self) -> int | None:
        return int(self.lasts[-1]) if self.starts.size else None

    @property
    def counterexamples(self) -> np.ndarray:
        """Every counterexample, ascending (expanded from the runs)."""
        if not self.starts.size:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.arange(a, b + 1) for a, b in zip(self.starts.tolist(), self.lasts.tolist())])

    def prime_counterexamples(self) -> tuple:
        return tuple(int(x) for x in self.starts[self.start_is_prime])

    def evaluate(self, x: int) -> RamanujanEval:
        """Exact evaluation at a counterexample from the stored run counts."""
        k = int(np.searchsorted(self.starts, x, side="right")) - 1
        if k < 0 or x > self.lasts[k]:
            raise DomainError(f"{x} is not a counterexample in this scan")
        return _exact_eval(int(x), int(self.pi_x[k]), int(self.pi_x_over_e[k]))

    def merged_runs(self) -> list[tuple[int, int]]:
        """Runs with adjacent ones joined."""
        out: list[list[int]] = []
        for a, b in zip(self.starts.tolist(), self.lasts.tolist()):
            if out and out[-1][1] + 1 == a:
                out[-1][1] = b
            else:
                out.append([a, b])
        return [tuple(r) for r in out]


def _jumps_of_e(qs: np.ndarray) -> np.ndarray:
    """ceil(e q) for each prime q; near-integer products are redone exactly."""
    prod = qs.astype(np.float64) * E
    out = np.ceil(prod).astype(np.int64)
    frac = prod - np.floor(prod)
    risky = np.flatnonzero((frac < 1e-4) | (frac > 1 - 1e-4))
    for k in risky.tolist():
        out[k] = ceil_mul_e(int(qs[k]))
    return out


def _run_end(x: int, end: int, px: int, pe: int) -> int:
    """Last integer y in [x, end) with f(y) >= 0, given f(x) >= 0; f decreases on the run."""
    lo, hi = x, end  # f(lo) >= 0; hi is past the run
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f_from_counts(mid, px, pe) >= 0:
            lo = mid
        else:
            hi = mid
    return lo


def exhaustive_counterexample_scan(lo, hi, chunk: int = 1 << 26, threads=None, progress=None) -> ScanResult:
    """Every integer x in [lo, hi] with f(x) >= 0.

    f is evaluated only where it can jump up (x = lo and primes) and where
    pi(x/e) steps (x = ceil(e q)); a float pass flags near-zero or positive
    values and exact arithmetic settles them. Each counterexample run is
    closed by bisection, since f is decreasing until the next jump point.
    """
    lo, hi = max(math.ceil(lo), 3), math.floor(hi)
    empty = np.zeros(0, dtype=np.int64)
    if hi < lo:
        return ScanResult(lo, hi, empty, empty, empty, empty, empty.astype(bool), 0)
    sieve._check_cap(hi)
    start_e = floor_div_e(lo - 1)
    base = sieve.count_at(1, sorted({start_e, lo - 1}), threads=threads)
    pi_base = int(base[-1])
    pe_base = int(base[0])
    bp = K.base_primes(hi)
    runs: list[tuple] = []
    events = 0
    a = lo
    while a <= hi:
        b = min(hi, a + chunk - 1)
        P = K.collect_primes(a, b, bp, K.PATTERN, sieve.DEFAULT_SEGMENT)
        q_lo, q_hi = floor_div_e(a - 1) + 1, floor_div_e(b)
        Q = K.collect_primes(q_lo, q_hi, bp, K.PATTERN, sieve.DEFAULT_SEGMENT) if q_hi >= max(q_lo, 2) else empty
        JQ = _jumps_of_e(Q)
        ev = np.unique(np.concatenate([np.array([a], dtype=np.int64), P, JQ]))
        events += ev.size
        px = pi_base + np.searchsorted(P, ev, side="right")
        pe = pe_base + np.searchsorted(JQ, ev, side="right")
        xf = ev.astype(np.float64)
        a2 = px.astype(np.float64) ** 2
        b2 = E * xf / np.log(xf) * pe.astype(np.float64)
        near = np.flatnonzero(a2 - b2 >= -1e-9 * (a2 + b2) - 1.0)
        nxt = np.append(ev[1:], b + 1)
        isp = np.isin(ev[near], P)
        for k, prime in zip(near.tolist(), isp.tolist()):
            x, pix, pie = int(ev[k]), int(px[k]), int(pe[k])
            if f_from_counts(x, pix, pie) < 0:
                continue
            runs.append((x, _run_end(x, int(nxt[k]), pix, pie), pix, pie, prime))
        pi_base += int(P.size)
        pe_base += int(Q.size)
        if progress:
            progress(f"scan: through {b}, {len(runs)} counterexample runs")
        a = b + 1
    cols = list(zip(*runs)) if runs else [[], [], [], [], []]
    return ScanResult(
        lo, hi, *(np.array(c, dtype=np.int64) for c in cols[:4]), np.array(cols[4], dtype=bool), events,
    )


def naive_counterexamples(lo: int, hi: int) -> tuple:
    """All-integer reference scan for small ranges (exact counts, float f with exact recheck)."""
    lo, hi = max(int(lo), 3), int(hi)
    n = np.arange(0, hi + 1)
    isp = np.zeros(hi + 1, dtype=np.int64)
    isp[sieve.sieve_primes(2, hi).primes] = 1
    pi_arr = np.cumsum(isp)
    out = []
    for x in range(lo, hi + 1):
        pe = int(pi_arr[floor_div_e(x)])
        px = int(pi_arr[x])
        if f_from_counts(x, px, pe) >= 0:
            out.append(x)
    return tuple(out)


# --------------------------------------------------------------------------
# asymptotic expansions

PI_SQ_COEFFS = (1, 2, 5, 16, 64)
RHS_COEFFS = (1, 2, 5, 16, 65)


def square_coefficients() -> tuple:
    """Coefficients of 1/log^k x, k = 2..6, in (sum_{j<=4} j!/log^(j+1) x)^2."""
    a = [math.factorial(j) for j in range(5)]
    return tuple(sum(a[i] * a[n - i] for i in range(n + 1)) for n in range(5))


def shifted_coefficients() -> tuple:
    """Same for (1/log x) sum_{k<=4} k!/(log x - 1)^(k+1), using 1/(L-1)^(k+1) = sum C(k+j, j)/L^(k+1+j)."""
    return tuple(sum(math.factorial(k) * math.comb(m, k) for k in range(m + 1)) for m in range(5))


@dataclass(frozen=True)
class SeriesCheck:
    log_x: float
    ratio_displayed: float  # displayed 5-term polynomials, difference over -x^2/log^6 x
    ratio_full: float  # exact 5-term sums, including all higher-order cross terms
    coefficients_ok: bool

    @property
    def ok(self) -> bool:
        return self.coefficients_ok and abs(self.ratio_displayed - 1) <= 0.1


def series_coefficients_check(log_x: float = 100.0) -> SeriesCheck:
    """Compare the two expansions at x = e^log_x; everything is scaled by x^2."""
    with mpmath.workdps(50):
        L = mpmath.mpf(log_x)
        target = -1 / L**6
        lhs = sum(c / L ** (k + 2) for k, c in enumerate(PI_SQ_COEFFS))
        rhs = sum(c / L ** (k + 2) for k, c in enumerate(RHS_COEFFS))
        full_l = sum(mpmath.factorial(k) / L ** (k + 1) for k in range(5)) ** 2
        full_r = sum(mpmath.factorial(k) / (L - 1) ** (k + 1) for k in range(5)) / L
        ok = square_coefficients() == PI_SQ_COEFFS and shifted_coefficients() == RHS_COEFFS
        return SeriesCheck(float(log_x), float((lhs - rhs) / target), float((full_l - full_r) / target), ok)


def stderr_progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)
