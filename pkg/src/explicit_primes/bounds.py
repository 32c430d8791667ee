"""Closed-form bounds and the threshold solvers built on them.

Thresholds of the size met here (x around e^(10^15)) only exist in log
space, so every solver works with y = log x.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, SolverRangeError

A_RAMARE = 9.7
C_FORD = 57.54
R_MT = 6.315
SLACK = 1e-3


@dataclass(frozen=True)
class BoundReport:
    """One bound evaluation: ``satisfied`` says whether value < threshold.

    ``margin`` is threshold - value, so it is positive exactly when satisfied.
    """

    name: str
    inputs: dict
    value: float
    threshold: float
    satisfied: bool
    margin: float
    notes: str = ""

    @classmethod
    def below(cls, name, inputs, value, threshold, notes=""):
        value, threshold = float(value), float(threshold)
        return cls(name, dict(inputs), value, threshold, value < threshold, threshold - value, notes)

    def as_row(self) -> dict:
        row = {"name": self.name}
        row.update(self.inputs)
        row.update(value=self.value, threshold=self.threshold, satisfied=self.satisfied, margin=self.margin)
        return row


# --------------------------------------------------------------------------
# zero-free region and zero density


def ford_nu(T: float, c: float = C_FORD) -> float:
    """Width of the zero-free region: zeros up to height T have sigma < 1 - nu(T)."""
    if T < 3:
        raise DomainError(f"ford_nu needs T >= 3, got {T}")
    L = math.log(T)
    return 1.0 / (c * L ** (2 / 3) * math.log(L) ** (1 / 3))


def ramare_density(sigma: float, T: float, A: float = A_RAMARE) -> float:
    """Majorant for N(sigma, T), valid for T >= 2000 and sigma >= 0.52."""
    if T < 2000 or sigma < 0.52:
        raise DomainError(f"density bound needs T >= 2000 and sigma >= 0.52, got T={T}, sigma={sigma}")
    L = math.log(T)
    return A * (3 * T) ** (8 * (1 - sigma) / 3) * L ** (5 - 2 * sigma) + 103 * L * L


# --------------------------------------------------------------------------
# primes between cubes and m-th powers


def cube_ineq_density(y, A: float = A_RAMARE, c: float = C_FORD, k: float = 0.95):
    """Left minus right side of the zero-density inequality; negative means it holds."""
    y = np.asarray(y, dtype=np.float64)
    ly = np.log(y)
    return (
        math.log(27 * A / 256)
        + (4 - k) * ly
        - 4 / (3 ** (2 / 3) * c) * y ** (k - 2 / 3) / np.cbrt(ly)
        - math.log(0.5 * (1 - SLACK))
    )


def cube_ineq_cubes(y, k: float):
    """Left minus right side of the interval-length inequality for cubes."""
    y = np.asarray(y, dtype=np.float64)
    return 11 / 4 * np.log(y) + 3 / 8 * y**k - y / 24 - math.log(0.25 * (1 - SLACK))


def cube_ineq_mpower(y, k: float, m: int):
    """The interval-length inequality for consecutive m-th powers."""
    y = np.asarray(y, dtype=np.float64)
    return 11 / 4 * np.log(y) - (3 / 8 - 1 / m) * y + 3 / 8 * y**k - math.log(m / 12 * (1 - SLACK))


@dataclass(frozen=True)
class CubeSolveResult:
    A: float
    c: float
    k: float
    m: int
    y_star: float
    loglog_n0: float
    y_density: float
    y_interval: float
    certified: bool
    horizon: float

    def as_row(self) -> dict:
        return dict(
            m=self.m, A=self.A, c=self.c, k=self.k, y_star=self.y_star, loglog_n0=self.loglog_n0,
            y_density=self.y_density, y_interval=self.y_interval, certified=self.certified,
        )


Y_MIN = 10.0
Y_MAX = 1e18


def eventual_threshold(
    fn: Callable[[np.ndarray], np.ndarray],
    y_min: float = Y_MIN,
    y_max: float = Y_MAX,
    per_decade: int = 10_000,
    sig: int = 6,
) -> float:
    """Smallest y on a geometric grid with fn < 0 at every later grid point.

    The crossing is then refined by bisection to ``sig`` significant figures.
    """
    n = int(round(math.log10(y_max / y_min) * per_decade)) + 1
    ys = np.geomspace(y_min, y_max, n)
    ok = fn(ys) < 0
    if not ok[-1]:
        raise SolverRangeError(f"inequality still fails at y = {y_max:g}")
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return float(ys[0])
    i = int(bad[-1])
    lo, hi = float(ys[i]), float(ys[i + 1])
    while (hi - lo) > hi * 10.0 ** (-sig):
        mid = 0.5 * (lo + hi)
        if fn(np.array([mid]))[0] < 0:
            hi = mid
        else:
            lo = mid
    return hi


def _certify(fns, y_star, reach=10.0, samples=2001) -> bool:
    ys = np.geomspace(y_star, reach * y_star, samples)
    return all(bool(np.all(f(ys) < 0)) for f in fns)


def _solve(fn_density, fn_interval, A, c, k, m, per_decade, reach):
    if not 2 / 3 < k < 1:
        raise DomainError(f"need 2/3 < k < 1, got k={k}")
    if A <= 0 or c <= 0:
        raise DomainError("A and c must be positive")
    y1 = eventual_threshold(fn_density, per_decade=per_decade)
    y2 = eventual_threshold(fn_interval, per_decade=per_decade)
    y = max(y1, y2)
    return CubeSolveResult(
        A, c, k, m, y, math.log(y) - math.log(m), y1, y2,
        _certify((fn_density, fn_interval), y, reach), reach * y,
    )


def solve_cubes(A: float = A_RAMARE, c: float = C_FORD, k: float = 0.9359,
                per_decade: int = 10_000, reach: float = 10.0) -> CubeSolveResult:
    """Threshold y = log x beyond which both cube inequalities hold; n0 = x^(1/3)."""
    return _solve(
        lambda y: cube_ineq_density(y, A, c, k), lambda y: cube_ineq_cubes(y, k),
        A, c, k, 3, per_decade, reach,
    )


def solve_mpowers(m: int, A: float = A_RAMARE, c: float = C_FORD, k: float = 0.97,
                  per_decade: int = 10_000, reach: float = 10.0) -> CubeSolveResult:
    """As ``solve_cubes`` for consecutive m-th powers; loglog n0 = log y - log m."""
    m = int(m)
    if m < 4:
        raise DomainError(f"m-th power solver needs m >= 4, got {m}")
    return _solve(
        lambda y: cube_ineq_density(y, A, c, k), lambda y: cube_ineq_mpower(y, k, m),
        A, c, k, m, per_decade, reach,
    )


def all_n_gap(m: float, loglog: float = 19.807) -> float:
    """log of exp(K/m) / (111 K^2 m) with K = 1000 e^loglog; sign change gives the crossover m."""
    K = 1000.0 * math.exp(loglog)
    return K / m - math.log(111.0 * K * K * m)


def solve_all_n(loglog: float = 19.807, lo: float = 1e8, hi: float = 1e11) -> int:
    """Smallest integer m past which primes lie between consecutive m-th powers for all n."""
    if all_n_gap(lo, loglog) <= 0 or all_n_gap(hi, loglog) >= 0:
        raise SolverRangeError(f"no sign change of the region gap on [{lo:g}, {hi:g}]")
    root = optimize.brentq(lambda m: all_n_gap(m, loglog), lo, hi, xtol=1e-6, rtol=1e-15)
    return math.ceil(root)


# --------------------------------------------------------------------------
# Cramer-type constants


def cramer_term(alpha: float) -> float:
    """alpha/pi + 4/(pi alpha), the coefficient of sqrt(x) log(alpha x / h)."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return alpha / math.pi + 4 / (math.pi * alpha)


def cramer_argmin(hi: float = 10.0) -> tuple[float, float]:
    """Minimiser and minimum of ``cramer_term`` on (0, hi]."""
    res = optimize.minimize_scalar(cramer_term, bounds=(1e-6, hi), method="bounded", options={"xatol": 1e-12})
    return float(res.x), float(res.fun)


def _sinc2(t):
    return 1.0 if t == 0 else (math.sin(t) / t) ** 2


def sinc2_integral(X: float, tol: float = 1e-10) -> tuple[float, float]:
    """int_0^X sin^2 t / t^2 dt and an error estimate.

    Integrated one half-period at a time so each piece is smooth and
    unimodal; the pieces are summed with fsum.
    """
    if X < 0:
        raise DomainError("X must be non-negative")
    edges = np.append(np.arange(0.0, X, math.pi), X)
    vals, errs = [], []
    per = tol / max(len(edges) - 1, 1)
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = integrate.quad(_sinc2, a, b, epsabs=per, epsrel=0.0, limit=200)
        vals.append(v)
        errs.append(e)
    return math.fsum(vals), math.fsum(errs)


def sinc2_closed_form(X: float) -> float:
    """Si(2X) - sin^2(X)/X, for cross-checking the quadrature."""
    from scipy.special import sici

    if X == 0:
        return 0.0
    return float(sici(2 * X)[0] - math.sin(X) ** 2 / X)


def cramer_refined_c(alpha: float) -> float:
    """2/(pi alpha) + (1/pi) int_0^(alpha/2) sin^2 t / t^2 dt; tends to 1/2."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    return 2 / (math.pi * alpha) + sinc2_integral(alpha / 2)[0] / math.pi


# --------------------------------------------------------------------------
# Ramanujan's inequality, unconditional threshold


def mt_epsilon0(x: float) -> float:
    """Relative error factor with |theta(x) - x| <= x eps0(x) for x >= 149."""
    if x < 149:
        raise DomainError(f"mt_epsilon0 needs x >= 149, got {x}")
    X = math.sqrt(math.log(x) / R_MT)
    return math.sqrt(8 / (17 * math.pi)) * math.sqrt(X) * math.exp(-X)


def mt_epsilon0_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    X = np.sqrt(np.log(x) / R_MT)
    return math.sqrt(8 / (17 * math.pi)) * np.sqrt(X) * np.exp(-X)


def theta_ineq(y, a: float):
    """Left minus right side of the log-space condition that eps0(e^y) < a / y^5."""
    y = np.asarray(y, dtype=np.float64)
    return (
        math.log(math.sqrt(8 / (17 * math.pi)) / (R_MT**0.25 * a))
        + 21 / 4 * np.log(y)
        - np.sqrt(y / R_MT)
    )


LOG2 = math.log(2.0)
TAIL_A = math.fsum(math.factorial(k) / LOG2 ** (k + 1) for k in range(1, 6))


def big_m(a: float, L: float) -> float:
    """Upper-bound coefficient M_a of x/log^6 x, for log x_a = L."""
    return (
        120 + a + (a + 720) / L + (1792 * a + 1290240) / L**2
        + (5040 + 7 * a) / LOG2**8 * math.exp(6 * math.log(L) - L / 2)
    )


def small_m(a: float, L: float) -> float:
    """Lower-bound coefficient m_a of x/log^6 x, for log x_a = L."""
    return (
        120 - a - a / L - 1792 / L**2
        - 2 * TAIL_A * math.exp(6 * math.log(L) - L)
        - 7 * a / LOG2**8 * math.exp(6 * math.log(L) - L / 2)
    )


def eps_big(M: float, y):
    y = np.asarray(y, dtype=np.float64)
    return 72 + 2 * M + (2 * M + 132) / y + (4 * M + 288) / y**2 + (12 * M + 576) / y**3 + 48 * M / y**4 + M * M / y**5


def eps_small(m: float, y):
    y = np.asarray(y, dtype=np.float64)
    return 206 + m + 364 / y + 381 / y**2 + 238 / y**3 + 97 / y**4 + 30 / y**5 + 8 / y**6


@dataclass(frozen=True)
class UnconditionalResult:
    a: float
    y_a: int
    big_m: float
    small_m: float
    y_a_prime: int
    y_a_prime_unconstrained: int
    threshold_log: int

    def as_row(self) -> dict:
        return dict(
            a=self.a, y_a=self.y_a, M_a=self.big_m, m_a=self.small_m, y_a_prime=self.y_a_prime,
            y_a_prime_unconstrained=self.y_a_prime_unconstrained, threshold_log=self.threshold_log,
        )


def _last_failure(fn, lo: int, hi: int) -> int | None:
    ys = np.arange(lo, hi + 1, dtype=np.float64)
    bad = np.flatnonzero(~fn(ys))
    if bad.size and bad[-1] == ys.size - 1:
        raise SolverRangeError(f"condition still fails at y = {hi}")
    return int(ys[bad[-1]]) if bad.size else None


def ramanujan_unconditional(a: float, y_max: int = 10**6) -> UnconditionalResult:
    """Integer thresholds y_a, y_a' with Ramanujan's inequality for x > exp(max(1 + y_a, y_a')).

    y_a is the least integer beyond which theta_ineq holds. y_a' is the
    least integer y >= y_a + 1 with y > eps_M(y) - eps_m(y) from there on;
    the restriction reflects that the pi(x/e) bound needs x/e > x_a.
    """
    if a <= 0:
        raise DomainError("a must be positive")
    last = _last_failure(lambda y: theta_ineq(y, a) <= 0, 2, y_max)
    y_a = 2 if last is None else last + 1
    M, m = big_m(a, y_a), small_m(a, y_a)

    def good(y):
        return y > eps_big(M, y) - eps_small(m, y)

    last = _last_failure(good, 1, y_max)
    free = 1 if last is None else last + 1
    y_p = max(free, y_a + 1)
    return UnconditionalResult(a, y_a, M, m, y_p, free, max(1 + y_a, y_p))


# --------------------------------------------------------------------------
# Ramanujan's inequality on RH


def offset_li(x: float) -> float:
    """Li(x) = int_2^x dt / log t, by quadrature in u = log t."""
    if x < 2:
        raise DomainError(f"offset_li needs x >= 2, got {x}")
    if x == 2:
        return 0.0
    lx = math.log(x)
    # scale by e^-lx so the integrand stays O(1)
    v, _ = integrate.quad(lambda u: math.exp(u - lx) / u, LOG2, lx, epsabs=0.0, epsrel=1e-13, limit=400)
    return v * x


def schoenfeld_gap(x: float) -> float:
    """sqrt(x) log(x) / (8 pi), the RH bound on |pi(x) - li(x)| for x >= 2657."""
    if x < 2657:
        raise DomainError(f"Schoenfeld's bound needs x >= 2657, got {x}")
    return math.sqrt(x) * math.log(x) / (8 * math.pi)


def conditional_g(x: float) -> float:
    """Upper bound on pi^2(x) - (e x / log x) pi(x/e), on RH, for x >= 2657 e."""
    if x < 2657 * math.e:
        raise DomainError(f"g(x) needs x >= 2657 e, got {x}")
    lx = math.log(x)
    xe = x / math.e
    lower = offset_li(xe) - math.sqrt(xe) * (lx - 1) / (8 * math.pi)
    return offset_li(x) ** 2 - math.e * x / lx * lower


# --------------------------------------------------------------------------
# primes in progressions


def totient(n: int) -> int:
    n = int(n)
    if n < 1:
        raise DomainError("totient needs n >= 1")
    r, out, p = n, n, 2
    while p * p <= r:
        if r % p == 0:
            while r % p == 0:
                r //= p
            out -= out // p
        p += 1
    if r > 1:
        out -= out // r
    return out


def brun_titchmarsh(x: float, y: float, k: int) -> float:
    """2y / (phi(k) log(y/k)), bounding primes = l mod k in (x, x + y]."""
    if y / k <= 1 + 1e-9:
        raise DomainError(f"Brun-Titchmarsh needs y > k, got y={y}, k={k}")
    return 2 * y / (totient(k) * math.log(y / k))
