"""Tables of nontrivial zeta zeros and the zero statistics built on them.

Only ordinates are stored. Every loaded zero is taken to lie on the
critical line, which is known far past any table shipped or loaded here.
"""
from __future__ import annotations

import gzip
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DomainError, HorizonError, ParseError, ValidationError

ZEROS_ENV = "EXPLICIT_PRIMES_ZEROS"
FIRST_ZERO = 14.1347
EULER_GAMMA = 0.5772156649015329
# the value quoted for sum 1/|rho|^2, gamma - 2 + log(4 pi)
QUOTED_INVERSE_SQUARE_SUM = EULER_GAMMA - 2.0 + math.log(4.0 * math.pi)
# 2 + gamma - log(4 pi), the value of sum 1/|rho|^2 under RH
TRUE_INVERSE_SQUARE_SUM = 2.0 + EULER_GAMMA - math.log(4.0 * math.pi)


@dataclass(frozen=True)
class ZeroTable:
    """Ascending positive ordinates of zeta zeros on the critical line."""

    gammas: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.gammas, dtype=np.float64).reshape(-1)
        if g.size:
            if not np.all(np.isfinite(g)) or g[0] <= 0:
                raise ValidationError("ordinates must be finite and positive")
            bad = np.flatnonzero(np.diff(g) <= 0)
            if bad.size:
                raise ValidationError(f"ordinates not strictly ascending at entry {int(bad[0]) + 2}")
            if abs(g[0] - FIRST_ZERO) > 1e-4:
                raise ValidationError(f"first ordinate {g[0]} is not the first zeta zero")
        g.setflags(write=False)
        object.__setattr__(self, "gammas", g)

    def __len__(self) -> int:
        return int(self.gammas.size)

    @property
    def max_height(self) -> float:
        return float(self.gammas[-1]) if self.gammas.size else 0.0

    def head(self, n: int) -> "ZeroTable":
        """The table of the first ``n`` zeros."""
        return ZeroTable(self.gammas[:n])

    def below(self, T: float) -> np.ndarray:
        """Ordinates strictly below ``T``."""
        self._check_horizon(T)
        return self.gammas[: int(np.searchsorted(self.gammas, T, side="left"))]

    def _check_horizon(self, T):
        if T > self.max_height:
            raise HorizonError(f"height {T} beyond table horizon {self.max_height}")

    def count_below(self, T: float) -> int:
        """N(T): the number of ordinates in (0, T]."""
        self._check_horizon(T)
        return int(np.searchsorted(self.gammas, T, side="right"))

    def window_count(self, t: float, upper: float = 1.0) -> int:
        """N(t + upper) - N(t - 1), the zeros in (t - 1, t + upper]."""
        if t <= 50:
            raise DomainError(f"window counts need t > 50, got {t}")
        self._check_horizon(t + upper)
        g = self.gammas
        return int(np.searchsorted(g, t + upper, side="right") - np.searchsorted(g, t - 1, side="right"))

    def inverse_square_sum(self) -> "InverseSquareSum":
        """Sum of 1/|rho|^2 over the table (both half-planes) with a tail majorant."""
        g = self.gammas
        partial = float(2.0 * np.sum(1.0 / (0.25 + g * g))) if g.size else 0.0
        return InverseSquareSum(partial, inverse_square_tail(self.max_height) if g.size else math.inf, self.max_height)


@dataclass(frozen=True)
class InverseSquareSum:
    partial: float
    tail: float
    horizon: float

    @property
    def upper(self) -> float:
        return self.partial + self.tail

    def contains(self, value: float) -> bool:
        return self.partial <= value <= self.upper


def inverse_square_tail(H: float) -> float:
    """2 * int_H^oo log(t / 2pi) / (2pi t^2) dt, the zero-density tail of the sum."""
    if H <= 2 * math.pi:
        return math.inf
    return 2.0 * (math.log(H / (2 * math.pi)) + 1.0) / (2 * math.pi * H)


def riemann_von_mangoldt_bound(T):
    """T log T / (2 pi), an upper bound for N(T) when T > 15."""
    T = np.asarray(T, dtype=np.float64)
    return T * np.log(T) / (2 * math.pi)


@dataclass(frozen=True)
class GridCheck:
    """Outcome of a grid scan: number of points, worst margin, first failure."""

    name: str
    points: int
    worst_margin: float
    worst_at: float
    first_failure: float | None
    horizon: float

    @property
    def ok(self) -> bool:
        return self.first_failure is None


def check_density_grid(table: ZeroTable, lo: float = 20.0, hi: float | None = None, step: float = 1.0) -> GridCheck:
    """N(T) < T log T / (2 pi) on ``lo, lo + step, ...`` up to ``hi``."""
    hi = table.max_height if hi is None else min(hi, table.max_height)
    T = lo + step * np.arange(int(math.floor((hi - lo) / step + 1e-9)) + 1)
    counts = np.searchsorted(table.gammas, T, side="right")
    margin = riemann_von_mangoldt_bound(T) - counts
    return _grid_result("N(T) < T log T / 2pi", T, margin, table.max_height)


def check_window_grid(
    table: ZeroTable, lo: float = 50.0, hi: float = 5000.0, step: float = 0.01, upper: float = 1.01
) -> GridCheck:
    """N(t + upper) - N(t - 1) < log t on ``lo, lo + step, ...`` up to ``hi``.

    Evaluated on integer multiples of ``step`` so that grid points are exact.
    """
    hi = min(hi, table.max_height - upper)
    k0 = int(math.ceil(lo / step - 1e-9))
    k1 = int(math.floor(hi / step + 1e-9))
    t = np.arange(k0, k1 + 1, dtype=np.float64) * step
    g = table.gammas
    counts = np.searchsorted(g, t + upper, side="right") - np.searchsorted(g, t - 1, side="right")
    margin = np.log(t) - counts
    return _grid_result("N(t+1.01) - N(t-1) < log t", t, margin, table.max_height)


def _grid_result(name, x, margin, horizon) -> GridCheck:
    i = int(np.argmin(margin))
    fails = np.flatnonzero(margin <= 0)
    return GridCheck(
        name,
        int(x.size),
        float(margin[i]),
        float(x[i]),
        float(x[fails[0]]) if fails.size else None,
        horizon,
    )


# --------------------------------------------------------------------------
# loading


def parse_zeros(lines) -> ZeroTable:
    """Parse one decimal ordinate per line; blank lines are not allowed."""
    vals = []
    prev = None
    for i, raw in enumerate(lines, 1):
        s = raw.strip()
        try:
            v = float(s)
        except ValueError:
            raise ParseError(f"not a number: {s!r}", i) from None
        if not math.isfinite(v) or v <= 0:
            raise ParseError(f"ordinate must be positive: {s!r}", i)
        if prev is not None and v <= prev:
            raise ParseError(f"ordinate {s} does not exceed the previous one", i)
        vals.append(v)
        prev = v
    if not vals:
        raise ParseError("empty zero table", 1)
    try:
        return ZeroTable(np.array(vals))
    except ValidationError as exc:
        raise ParseError(str(exc), 1) from None


def load_zeros(path) -> ZeroTable:
    """Read a zero table file, optionally gzip-compressed (``.gz``)."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        text = fh.read()
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    return parse_zeros(lines)


_BUNDLED = "zeros_100k.txt.gz"
_cache: dict[str, ZeroTable] = {}


def default_zeros_path() -> Path:
    env = os.environ.get(ZEROS_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("explicit_primes") / "data" / _BUNDLED))


def default_zeros() -> ZeroTable:
    """The table named by ``$EXPLICIT_PRIMES_ZEROS``, else the bundled 100k zeros."""
    p = str(default_zeros_path())
    if p not in _cache:
        _cache[p] = load_zeros(p)
    return _cache[p]
