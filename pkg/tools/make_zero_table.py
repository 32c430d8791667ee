#!/usr/bin/env python3
"""Generate a table of the first N ordinates of nontrivial zeta zeros.

Odlyzko's public tables are the usual source; this script rebuilds the
first ``--count`` ordinates offline so the repository is self-contained.

Method: Riemann-Siegel Z(t) with the C0..C3 remainder terms, evaluated
vectorised in numpy. Sign changes are located on a uniform grid, the
count is checked against Gram's law at every good Gram point, and each
bracket is refined by bisection. Low ordinates (t < 1000) are refined with
mpmath's siegelz instead. Written as plain text, one ordinate per line,
9 decimals.
"""
import argparse
import gzip
import math
import sys

import mpmath
import numpy as np

TWO_PI = 2.0 * math.pi


def _psi_taylor(order=70):
    # Psi(1/2 + z) = cos(2 pi (z^2 - 5/16)) / -cos(2 pi z) is entire and even
    with mpmath.workdps(60):
        f = lambda z: mpmath.cos(2 * mpmath.pi * (z * z - mpmath.mpf(5) / 16)) / (
            -mpmath.cos(2 * mpmath.pi * z)
        )
        return [mpmath.mpf(c) for c in mpmath.taylor(f, 0, order)]


def _deriv_coeffs(coeffs, k):
    out = list(coeffs)
    for _ in range(k):
        out = [out[i] * i for i in range(1, len(out))]
    return np.array([float(c) for c in out])


_TAYLOR = _psi_taylor()
_D = {k: _deriv_coeffs(_TAYLOR, k) for k in (0, 1, 2, 3, 5, 6, 9)}


def _poly(coeffs, z):
    return np.polynomial.polynomial.polyval(z, coeffs)


def rs_theta(t):
    return (
        t / 2 * np.log(t / TWO_PI)
        - t / 2
        - math.pi / 8
        + 1 / (48 * t)
        + 7 / (5760 * t**3)
        + 31 / (80640 * t**5)
    )


def rs_z(t):
    t = np.asarray(t, dtype=np.float64)
    a = np.sqrt(t / TWO_PI)
    n_max = np.floor(a).astype(np.int64)
    z = (a - n_max) - 0.5
    th = rs_theta(t)
    total = np.zeros_like(t)
    for n in range(1, int(n_max.max()) + 1):
        mask = n_max >= n
        term = np.cos(th - t * math.log(n)) / math.sqrt(n)
        total += np.where(mask, term, 0.0)
    total *= 2
    pi2 = math.pi**2
    c0 = _poly(_D[0], z)
    c1 = -_poly(_D[3], z) / (96 * pi2)
    c2 = _poly(_D[2], z) / (64 * pi2) + _poly(_D[6], z) / (18432 * pi2**2)
    c3 = (
        -_poly(_D[1], z) / (64 * pi2)
        - _poly(_D[5], z) / (3840 * pi2**2)
        - _poly(_D[9], z) / (5308416 * pi2**3)
    )
    sign = np.where(n_max % 2 == 1, 1.0, -1.0)  # (-1)^(N-1)
    rem = sign * a**-0.5 * (c0 + c1 / a + c2 / a**2 + c3 / a**3)
    return total + rem


def z_chunked(t, chunk=400_000):
    out = np.empty_like(t)
    for i in range(0, t.size, chunk):
        out[i : i + chunk] = rs_z(t[i : i + chunk])
    return out


def gram_points(n_lo, n_hi):
    """Gram points g_n for n in [n_lo, n_hi) by Newton on theta(t) = n pi."""
    n = np.arange(n_lo, n_hi, dtype=np.float64)
    # asymptotic start: g ~ 2 pi exp(1 + W(n/e + 1/(8e)))
    from scipy.special import lambertw

    g = TWO_PI * np.exp(1 + np.real(lambertw((n + 0.125) / math.e)))
    for _ in range(6):
        g -= (rs_theta(g) - n * math.pi) / (0.5 * np.log(g / TWO_PI))
    return n.astype(np.int64), g


def locate(t_max, step):
    grid = np.arange(10.0, t_max, step)
    vals = z_chunked(grid)
    s = np.signbit(vals)
    idx = np.flatnonzero(s[1:] != s[:-1])
    return grid[idx], grid[idx + 1]


def check_gram(zeros, t_max):
    """Count zeros below every good Gram point; expect n + 1."""
    n_hi = int(rs_theta(np.array([t_max]))[0] / math.pi) - 1
    n, g = gram_points(0, n_hi)
    zg = z_chunked(g)
    good = (np.where(n % 2 == 0, 1.0, -1.0) * zg) > 0
    counts = np.searchsorted(zeros, g[good])
    bad = np.flatnonzero(counts != n[good] + 1)
    return g[good][bad], counts[bad], n[good][bad] + 1


def refine(lo, hi, iters=48):
    flo = z_chunked(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = z_chunked(mid)
        same = np.signbit(fm) == np.signbit(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def refine_mp(lo, hi):
    out = []
    for a, b in zip(lo, hi):
        with mpmath.workdps(30):
            r = mpmath.findroot(mpmath.siegelz, (mpmath.mpf(a), mpmath.mpf(b)), solver="anderson")
        out.append(float(r))
    return np.array(out)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=100_000)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    # generous height: N(T) ~ T/2pi log(T/2pi e)
    t_max = 20.0
    while (t_max / TWO_PI) * math.log(t_max / (TWO_PI * math.e)) < args.count + 50:
        t_max *= 1.05
    lo, hi = locate(t_max, args.step)
    print(f"{lo.size} sign changes below {t_max:.1f}", file=sys.stderr)
    low = hi < 1000
    zeros = np.concatenate([refine_mp(lo[low], hi[low]), refine(lo[~low], hi[~low])])
    if np.any(np.diff(zeros) <= 0):
        sys.exit("non-increasing zeros after refinement")
    where, got, want = check_gram(zeros, t_max)
    if where.size:
        for w, g_, e_ in zip(where[:20], got[:20], want[:20]):
            print(f"Gram mismatch at {w:.4f}: counted {g_}, expected {e_}", file=sys.stderr)
        sys.exit("zero count inconsistent with Gram points; lower --step")
    zeros = zeros[: args.count]
    opener = gzip.open if args.out.endswith(".gz") else open
    with opener(args.out, "wt") as fh:
        for z in zeros:
            fh.write(f"{z:.9f}\n")
    print(f"wrote {zeros.size} zeros, last {zeros[-1]:.9f}", file=sys.stderr)


if __name__ == "__main__":
    main()
