"""Truncated explicit formulas for psi and psi_1, checked against the sieve.

Sums over zeros pair each rho = 1/2 + i gamma with its conjugate, so they
are computed as 2 Re of a sum over gamma > 0. Contributions from zeros
above the table horizon are never added silently; each evaluation reports
a separate tail majorant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sieve
from .bounds import sinc2_integral
from .errors import DomainError, HorizonError
from .zeros import ZeroTable, inverse_square_tail

LOG_2PI = math.log(2 * math.pi)
E60 = math.exp(60)


def _is_half_odd(x: float) -> bool:
    return (2 * x) % 2 == 1


@dataclass(frozen=True)
class FormulaEvaluation:
    x: float
    T: float
    zeros_used: int
    main_term: float
    zero_sum: float
    constant_terms: float
    predicted_psi: float
    exact_psi: float
    residual: float
    error_budget: float
    half_odd: bool
    regime: str  # "theorem" when x > e^60 and 50 < T < x, else "empirical"

    @property
    def within_budget(self) -> bool:
        return abs(self.residual) < self.error_budget

    def as_row(self) -> dict:
        return dict(
            x=self.x, T=self.T, predicted=self.predicted_psi, exact=self.exact_psi,
            residual=self.residual, budget=self.error_budget, regime=self.regime,
        )


def zero_sum_psi(x: float, gammas: np.ndarray) -> float:
    """Sum of x^rho / rho over the given zeros and their conjugates."""
    L = math.log(x)
    g = np.asarray(gammas, dtype=np.float64)
    # x^(i g) / (1/2 + i g) = e^(i g L) (1/2 - i g) / (1/4 + g^2)
    re = (0.5 * np.cos(g * L) + g * np.sin(g * L)) / (0.25 + g * g)
    return 2.0 * math.sqrt(x) * float(np.sum(re))


def truncated_psi(x: float, T: float, zeros: ZeroTable, exact: float | None = None) -> FormulaEvaluation:
    """psi(x) from the zeros with 0 < gamma < T, with the 2 x log^2 x / T budget."""
    if x <= 2:
        raise DomainError(f"truncated_psi needs x > 2, got {x}")
    if T <= 0:
        raise DomainError("T must be positive")
    if T > zeros.max_height:
        raise HorizonError(f"T = {T} beyond table horizon {zeros.max_height}")
    g = zeros.below(T)
    main = float(x)
    zsum = zero_sum_psi(x, g)
    const = LOG_2PI + 0.5 * math.log1p(-1.0 / (x * x))
    pred = main - zsum - const
    ex = sieve.psi(x) if exact is None else float(exact)
    budget = 2 * x * math.log(x) ** 2 / T
    half = _is_half_odd(x)
    regime = "theorem" if (x > E60 and 50 < T < x and half) else "empirical"
    return FormulaEvaluation(x, T, int(g.size), main, zsum, const, pred, ex, ex - pred, budget, half, regime)


# --------------------------------------------------------------------------
# psi_1


def psi1(x: float) -> float:
    """psi_1(x) = sum over n <= x of (x - n) Lambda(n)."""
    if x < 0:
        raise DomainError("psi1 needs x >= 0")
    n = math.floor(x)
    if n < 2:
        return 0.0
    lam = sieve.von_mangoldt(1, n)
    idx = np.flatnonzero(lam)
    return math.fsum(((x - (idx + 1)) * lam[idx]).tolist())


def _rho_rho1(g):
    # rho (rho + 1) with rho = 1/2 + i g
    return (0.75 - g * g) + 2j * g


def _zero_sum_psi1(x: float, g: np.ndarray) -> float:
    if g.size == 0:
        return 0.0
    L = math.log(x)
    terms = np.exp(1j * g * L) / _rho_rho1(g)
    return 2.0 * x**1.5 * float(np.sum(terms.real))


@dataclass(frozen=True)
class Psi1Comparison:
    x: float
    exact: float
    formula: float
    gap: float
    bound: float  # 12/5
    tail_slack: float
    zeros_used: int

    @property
    def ok(self) -> bool:
        return abs(self.gap) <= self.bound + self.tail_slack


def psi1_formula(x: float, zeros: ZeroTable) -> float:
    """x^2/2 - sum_rho x^(rho+1) / (rho (rho+1)) - x log 2pi over the loaded zeros."""
    if x <= 2:
        raise DomainError("psi1_formula needs x > 2")
    return x * x / 2 - _zero_sum_psi1(x, zeros.gammas) - x * LOG_2PI


def psi1_tail_slack(x: float, zeros: ZeroTable) -> float:
    """x^(3/2) times the inverse-square tail above the table horizon."""
    return x**1.5 * inverse_square_tail(zeros.max_height) if len(zeros) else math.inf


def compare_psi1(x: float, zeros: ZeroTable) -> Psi1Comparison:
    if float(x).is_integer():
        raise DomainError("the psi_1 formula needs non-integer x")
    ex = psi1(x)
    fm = psi1_formula(x, zeros)
    return Psi1Comparison(x, ex, fm, ex - fm, 12 / 5, psi1_tail_slack(x, zeros), len(zeros))


# --------------------------------------------------------------------------
# weighted short-interval sums


@dataclass(frozen=True)
class WeightedSum:
    x: float
    h: float
    exact: float
    formula: float
    sigma: float
    error_bound: float  # 48 / (5 h)
    tail_slack: float

    @property
    def gap(self) -> float:
        return self.exact - self.formula

    @property
    def ok(self) -> bool:
        return abs(self.gap) <= self.error_bound + self.tail_slack


def weighted_exact(x: float, h: float) -> float:
    """Sum of Lambda(n) (1 - |n - x| / h) over x - h < n < x + h."""
    if not 0 < h < x:
        raise DomainError(f"need 0 < h < x, got x={x}, h={h}")
    lo = math.floor(x - h) + 1
    hi = math.ceil(x + h) - 1
    lam = sieve.von_mangoldt(lo, hi)
    n = np.arange(lo, hi + 1, dtype=np.float64)
    w = 1.0 - np.abs(n - x) / h
    nz = lam > 0
    return math.fsum((lam[nz] * w[nz]).tolist())


def weighted_sigma(x: float, h: float, gammas) -> float:
    """Sum over rho of ((x+h)^(rho+1) - 2 x^(rho+1) + (x-h)^(rho+1)) / (rho (rho+1))."""
    g = np.asarray(gammas, dtype=np.float64)
    if g.size == 0:
        return 0.0
    num = sum(
        c * u**1.5 * np.exp(1j * g * math.log(u)) for c, u in ((1, x + h), (-2, x), (1, x - h))
    )
    return 2.0 * float(np.sum((num / _rho_rho1(g)).real))


def weighted_interval_sum(x: float, h: float, zeros: ZeroTable) -> WeightedSum:
    """Formula side h - Sigma/h next to the exact triangular-weight sum."""
    ex = weighted_exact(x, h)
    s = weighted_sigma(x, h, zeros.gammas)
    tail = 4 * (x + h) ** 1.5 * inverse_square_tail(zeros.max_height) / h if len(zeros) else math.inf
    return WeightedSum(x, h, ex, h - s / h, s, 48 / (5 * h), tail)


def second_difference_psi1(x: float, h: float) -> float:
    """(psi_1(x+h) - 2 psi_1(x) + psi_1(x-h)) / h, computed from one Lambda array."""
    if not 0 < h < x:
        raise DomainError(f"need 0 < h < x, got x={x}, h={h}")
    top = math.floor(x + h)
    lam = sieve.von_mangoldt(1, top)
    idx = np.flatnonzero(lam)
    n = (idx + 1).astype(np.float64)
    lv = lam[idx]

    def p1(u):
        s = n <= u
        return math.fsum(((u - n[s]) * lv[s]).tolist())

    return (p1(x + h) - 2 * p1(x) + p1(x - h)) / h


# --------------------------------------------------------------------------
# Sigma_1 / Sigma_2 majorants


def _check(x, h, alpha):
    if not 0 < h < x:
        raise DomainError(f"need 0 < h < x, got x={x}, h={h}")
    if alpha <= 0 or alpha * x / h <= 15:
        raise DomainError(f"need alpha x / h > 15, got {alpha * x / h}")


def sigma1_bound(x: float, h: float, alpha: float = 2.0) -> float:
    """alpha x h log(alpha x / h) / (pi sqrt(x - h)), bounding zeros below alpha x / h."""
    _check(x, h, alpha)
    return alpha * x * h / (math.pi * math.sqrt(x - h)) * math.log(alpha * x / h)


def sigma2_bound(x: float, h: float, alpha: float = 2.0) -> float:
    """4 h (x + h)^(3/2) log(alpha x / h) / (pi alpha x), bounding the remaining zeros."""
    _check(x, h, alpha)
    return 4 * h * (x + h) ** 1.5 / (math.pi * alpha * x) * math.log(alpha * x / h)


def sigma1_refined(x: float, h: float, alpha: float = 2.0) -> float:
    """Main term (2/pi) int_0^(alpha/2) sin^2 t / t^2 dt * h sqrt(x) log(x/h), without the O-term."""
    _check(x, h, alpha)
    return 2 / math.pi * sinc2_integral(alpha / 2)[0] * h * math.sqrt(x) * math.log(x / h)


def sigma1_actual(x: float, h: float, zeros: ZeroTable, alpha: float = 2.0) -> float:
    """|Sigma_1| computed from the zero table (zeros with gamma < alpha x / h)."""
    _check(x, h, alpha)
    T = alpha * x / h
    return abs(weighted_sigma(x, h, zeros.below(T)))
