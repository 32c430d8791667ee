"""Prime + squarefree and prime^2 + squarefree decompositions.

Two kinds of work live here: explicit lower bounds for the weighted
representation counts R(n), and desk-scale searches that cover the small
n those bounds do not reach.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import _kernels as K
from . import sieve
from .bounds import totient
from .errors import DomainError, ExhaustionError

ARTIN = 0.3739558
ARTIN_FLOOR = 0.373
FULL_SQUAREFREE_SUM = 1.95  # published upper bound for sum mu^2(a)/phi(a^2)
ERDOS_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43)


# --------------------------------------------------------------------------
# epsilon tables


@dataclass(frozen=True)
class EpsilonTable:
    """Relative error constants eps(q^2, x0) for odd primes q <= 97.

    ``text`` keeps the published decimal strings so the table can be
    compared digit for digit.
    """

    x0: str
    text: dict = field(repr=False)

    @property
    def values(self) -> dict:
        return {q: float(s) for q, s in self.text.items()}

    def __getitem__(self, q: int) -> float:
        return float(self.text[q])

    def __len__(self) -> int:
        return len(self.text)

    @property
    def primes(self) -> tuple:
        return tuple(sorted(self.text))


def _table_rows():
    raw = resources.files("explicit_primes").joinpath("data", "epsilon_tables.csv").read_text(encoding="utf-8")
    return list(csv.DictReader(io.StringIO(raw)))


def epsilon_table(x0: str = "1e10") -> EpsilonTable:
    """The table valid for x >= 10^10 (``"1e10"``) or x >= sqrt(2.5e14) (``"T"``)."""
    col = {"1e10": "eps_1e10", "T": "eps_T"}[x0]
    return EpsilonTable(x0, {int(r["q"]): r[col] for r in _table_rows()})


ERDOS_T = math.sqrt(2.5e14)


def omega_1e10(q: int) -> float:
    """omega(q^2, 10^10): tabulated for q <= 13, closed form from the x = 7 extremum above."""
    for r in _table_rows():
        if int(r["q"]) == q and r["omega_1e10"]:
            return float(r["omega_1e10"])
    if not 17 <= q <= 97:
        raise DomainError(f"no omega value for q = {q}")
    return (math.log(7) - 7 / totient(q * q)) / math.sqrt(7)


def derived_eps_T(q: int, T: float = ERDOS_T) -> float:
    """max(eps(q^2, 10^10), omega(q^2, 10^10) phi(q^2) / sqrt(T))."""
    return max(epsilon_table("1e10")[q], omega_1e10(q) * totient(q * q) / math.sqrt(T))


# --------------------------------------------------------------------------
# constants behind the Estermann bound


def mobius(n: int) -> int:
    n = int(n)
    if n < 1:
        raise DomainError("mobius needs n >= 1")
    r, s, p = n, 1, 2
    while p * p <= r:
        if r % p == 0:
            r //= p
            if r % p == 0:
                return 0
            s = -s
        p += 1
    return -s if r > 1 else s


def squarefree_weight_sum(upto: int) -> float:
    """Sum of mu^2(a) / phi(a^2) over a <= upto."""
    return math.fsum(1 / totient(a * a) for a in range(1, upto + 1) if mobius(a) != 0)


def squarefree_weight_product(limit: int = 10**6) -> float:
    """prod over p <= limit of (1 + 1/(p(p-1))); its infinite value is zeta(2)zeta(3)/zeta(6)."""
    p = K.small_primes(limit).astype(np.float64)
    return math.exp(math.fsum(np.log1p(1 / (p * (p - 1))).tolist()))


def estermann_tail_sum(total: float = FULL_SQUAREFREE_SUM, cut: int = 13) -> float:
    """Upper bound for sum over a > cut of mu^2(a)/phi(a^2), as total minus the head."""
    return total - squarefree_weight_sum(cut)


@dataclass(frozen=True)
class EpsilonSum:
    value: float
    covered: tuple
    uncovered: tuple


def estermann_epsilon_sum(eps: dict | None = None, cut: int = 13) -> EpsilonSum:
    """Sum of eps_a mu^2(a)/phi(a^2) over squarefree a <= cut with a known eps_a.

    ``eps`` maps a to eps_a for modulus a^2; the default uses the prime
    moduli of the 10^10 table. Squarefree a without an entry are listed in
    ``uncovered`` rather than guessed.
    """
    if eps is None:
        tab = epsilon_table("1e10")
        eps = {q: tab[q] for q in tab.primes if q <= cut}
    covered, missing, terms = [], [], []
    for a in range(1, cut + 1):
        if mobius(a) == 0:
            continue
        if a in eps:
            covered.append(a)
            terms.append(eps[a] / totient(a * a))
        else:
            missing.append(a)
    return EpsilonSum(math.fsum(terms), tuple(covered), tuple(missing))


def artin_product(limit: int = 10**6) -> float:
    """prod over p <= limit of (1 - 1/(p(p-1)))."""
    p = K.small_primes(limit).astype(np.float64)
    return math.exp(math.fsum(np.log1p(-1 / (p * (p - 1))).tolist()))


def estermann_lower_bound(n: float, A: float = 0.25, c: float = ARTIN_FLOOR,
                          eps_sum: float = 0.005, tail: float = 0.086) -> float:
    """Lower bound for R(n)/n, the log-weighted count of n = p + squarefree."""
    if n < 3:
        raise DomainError("n must be at least 3")
    if not 0 < A < 0.5:
        raise DomainError(f"need 0 < A < 1/2, got {A}")
    L = math.log(n)
    return (
        c - eps_sum - (1 + 2 * A) / (1 - 2 * A) * tail
        - n**-0.5 * L - n ** (-2 * A) * L - n ** (-A) * L
    )


# --------------------------------------------------------------------------
# Estermann search


@dataclass(frozen=True)
class Decomposition:
    """n = p^square_power + m with p prime and m squarefree.

    ``attempts`` counts the primes tried, the successful one included.
    """

    n: int
    p: int
    square_power: int
    m: int
    attempts: int


def _primes_descending(top: int, block: int = 4096):
    """Primes <= top in decreasing order, sieved one block at a time."""
    hi = top
    while hi >= 2:
        lo = max(2, hi - block + 1)
        yield from sieve.sieve_primes(lo, hi).primes[::-1].tolist()
        hi = lo - 1


def estermann_search(n: int, lookback: int = 100) -> Decomposition:
    """Largest prime p < n with n - p squarefree, trying at most ``lookback`` primes."""
    n = int(n)
    if n < 3:
        raise DomainError("n must be at least 3")
    tried = 0
    for p in _primes_descending(n - 1):
        tried += 1
        if sieve.is_squarefree(n - p):
            return Decomposition(n, p, 1, n - p, tried)
        if tried >= lookback:
            break
    raise ExhaustionError(n, tried)


@dataclass(frozen=True)
class ScanSummary:
    lo: int
    hi: int
    checked: int
    max_attempts: int
    worst_n: int
    failures: tuple  # (n, tried) pairs

    @property
    def ok(self) -> bool:
        return not self.failures


def estermann_scan(lo: int, hi: int, lookback: int = 100, window: int = 1 << 20) -> ScanSummary:
    """Run the largest-prime-first search for every n in [lo, hi]."""
    lo, hi = max(int(lo), 3), int(hi)
    if hi < lo:
        raise DomainError("empty range")
    primes = sieve.sieve_primes(2, hi).primes
    checked = 0
    worst, worst_n = 0, lo
    failures = []
    for a in range(lo, hi + 1, window):
        b = min(hi, a + window - 1)
        n = np.arange(a, b + 1, dtype=np.int64)
        top = np.searchsorted(primes, n, side="left") - 1  # largest prime < n
        # every residue n - p of this window lies in [a - p_top, b - p_min]
        pmin = int(primes[max(int(top[0]) - lookback + 1, 0)])
        flags = sieve.sieve_squarefree(max(0, a - int(primes[top[-1]])), b - pmin)
        f, off = flags.flags, flags.window_lo
        attempts = np.zeros(n.size, dtype=np.int64)
        open_ = np.ones(n.size, dtype=bool)
        for j in range(lookback):
            idx = top - j
            live = open_ & (idx >= 0)
            if not live.any():
                break
            m = n[live] - primes[idx[live]]
            hit = f[m - off]
            sel = np.flatnonzero(live)
            attempts[sel] = j + 1
            open_[sel[hit]] = False
        checked += n.size
        k = int(np.argmax(np.where(open_, -1, attempts)))
        if not open_[k] and attempts[k] > worst:
            worst, worst_n = int(attempts[k]), int(n[k])
        for i in np.flatnonzero(open_).tolist():
            failures.append((int(n[i]), int(attempts[i])))
    return ScanSummary(lo, hi, checked, worst, worst_n, tuple(failures))


# --------------------------------------------------------------------------
# Erdos search


@dataclass(frozen=True)
class ErdosScan:
    lo: int
    hi: int
    checked: int
    failures: tuple  # n with no p <= P
    resolved: dict  # n -> p found during escalation
    unresolved: tuple
    p_histogram: dict  # p -> number of n whose smallest admissible prime is p

    @property
    def max_p(self) -> int:
        return max(self.p_histogram) if self.p_histogram else 0

    @property
    def ok(self) -> bool:
        return not self.unresolved


def _erdos_admissible(n: np.ndarray) -> np.ndarray:
    return (n % 4 != 1) & (n >= 10)


def erdos_probe(n: int, primes=ERDOS_PRIMES) -> Decomposition | None:
    """Smallest listed prime p with n - p^2 squarefree; p = 2 is skipped when 4 | n."""
    n = int(n)
    for i, p in enumerate(primes, 1):
        if p == 2 and n % 4 == 0:
            continue
        m = n - p * p
        if m < 1:
            break
        if sieve.is_squarefree(m):
            return Decomposition(n, p, 2, m, i)
    return None


def erdos_search_range(N: int, W: int = 1 << 31, P: int = 43) -> list[int]:
    """All admissible n in [N, N + W) for which no prime p <= P leaves n - p^2 squarefree.

    One squarefree sieve covers [N - P^2, N + W - 4); each probe is a lookup.
    """
    N, W = int(N), int(W)
    if N < P * P + 10:
        raise DomainError(f"need N >= P^2 + 10 = {P * P + 10}, got {N}")
    hist: dict = {}
    return _erdos_window(N, W, P, hist)[0]


def _erdos_window(N, W, P, hist):
    ps = [int(p) for p in K.small_primes(P)]
    flags = sieve.sieve_squarefree(N - P * P, N + W - 5)
    f, off = flags.flags, flags.window_lo
    n = np.arange(N, N + W, dtype=np.int64)
    n = n[_erdos_admissible(n)]
    open_ = np.ones(n.size, dtype=bool)
    for p in ps:
        live = open_ if p != 2 else open_ & (n % 4 != 0)
        sel = np.flatnonzero(live)
        hit = f[n[sel] - p * p - off]
        done = sel[hit]
        if done.size:
            hist[p] = hist.get(p, 0) + int(done.size)
        open_[done] = False
    return n[open_].tolist(), int(n.size)


def erdos_scan(lo: int, hi: int, P: int = 43, W: int = 1 << 24, escalate_to: int = 200) -> ErdosScan:
    """Check every admissible n in [lo, hi], escalating failures to primes below ``escalate_to``."""
    lo, hi = max(int(lo), 10), int(hi)
    hist: dict = {}
    failures: list[int] = []
    checked = 0
    start = max(lo, P * P + 10)
    # below the sieve's reach, probe directly with every prime up to escalate_to
    small_ps = tuple(int(p) for p in K.small_primes(escalate_to))
    for n in range(lo, min(hi, start - 1) + 1):
        if n % 4 == 1:
            continue
        checked += 1
        d = erdos_probe(n, small_ps)
        if d is None:
            failures.append(n)
        elif d.p <= P:
            hist[d.p] = hist.get(d.p, 0) + 1
        else:
            failures.append(n)
    a = start
    while a <= hi:
        w = min(W, hi - a + 1)
        fails, cnt = _erdos_window(a, w, P, hist)
        failures.extend(fails)
        checked += cnt
        a += w
    resolved, unresolved = {}, []
    for n in failures:
        d = erdos_probe(n, small_ps)
        if d is None:
            unresolved.append(n)
        else:
            resolved[n] = d.p
            hist[d.p] = hist.get(d.p, 0) + 1
    return ErdosScan(lo, hi, checked, tuple(failures), resolved, tuple(unresolved), dict(sorted(hist.items())))


# --------------------------------------------------------------------------
# constants behind the Erdos bound


def reciprocal_prime_sum(lo: int, hi: int) -> float:
    """Sum of 1/(q(q-1)) over primes lo < q <= hi."""
    lo, hi = int(lo), int(hi)
    if not 2 <= lo < hi:
        raise DomainError(f"need 2 <= lo < hi, got lo={lo}, hi={hi}")
    q = sieve.sieve_primes(lo + 1, hi).primes.astype(np.float64)
    return math.fsum((1 / (q * (q - 1))).tolist())


def small_moduli_contribution(table: EpsilonTable | None = None) -> float:
    """Sum over the 24 tabulated q of 2(1 + eps(q^2, T)) / (q(q-1)), the sqrt(n) coefficient."""
    table = table or epsilon_table("T")
    return math.fsum(2 * (1 + table[q]) / (q * (q - 1)) for q in table.primes)


def large_moduli_constant(cut: int = 97, limit: int = 1_000_001) -> float:
    """Sum of 1/(q(q-1)) over primes cut < q < limit plus the 1/(limit-1) tail."""
    return reciprocal_prime_sum(cut, limit - 1) + 1 / (limit - 1)


def robin_omega_bound(n: float) -> float:
    """1.3841 log n / log log n, an upper bound for omega(n) when n >= 3."""
    return 1.3841 * math.log(n) / math.log(math.log(n))


def erdos_lower_bound(n: float, c_exp: float = 0.209, A: float = 0.0685,
                      small: float = 0.568, large: float = 0.00183) -> float:
    """Lower bound for R(n), the log-weighted count of n = p^2 + squarefree."""
    if n < 1e14:
        raise DomainError(f"the bound needs n >= 10^14, got {n}")
    if not 0 < c_exp < 0.25:
        raise DomainError("need 0 < c < 1/4")
    L = math.log(n)
    r = math.sqrt(n)
    lead = (1 - small - large / (0.25 - c_exp) - 0.8 / L**2 - (n ** (-2 * c_exp) + n ** (-c_exp)) * L) * r
    la = math.log(A * r)
    mid = A * r * L / la * (1 + 1.2762 / la)
    top = 2 ** robin_omega_bound(n) * (1.5 + 1 / (48 * A * A) + 9 / (2 * A * A * n)) * L
    return lead - mid - top


def b_count(n: int, A: float = 0.0685) -> tuple[int, float]:
    """Admissible B in n = p^2 + B q^2 with A sqrt(n) <= q, and the bound 2 + 1/(24A^2) + 9/(A^2 n).

    Counts integers B in [(n-9)/(A^2 n), 1/A^2) (the p <= 3 cases) plus
    integers B in [1, 1/A^2) with B = n - 1 mod 24 (the p > 3 cases).
    """
    top = 1 / (A * A)
    small_lo = (n - 9) / (A * A * n)
    k_hi = math.ceil(top) - 1
    small = max(0, k_hi - math.ceil(small_lo) + 1)
    r = (n - 1) % 24
    first = r if r >= 1 else 24
    big = 0 if first > k_hi else (k_hi - first) // 24 + 1
    return small + big, 2 + 1 / (24 * A * A) + 9 / (A * A * n)
