"""Compiled sieving kernels.

All kernels work on odd numbers only: index ``i`` of a segment whose first
odd number is ``2*g0 + 1`` stands for ``2*(g0 + i) + 1``. Multiples of the
wheel primes 3..13 are stamped from a precomputed pattern; the remaining
odd base primes are crossed off with carried offsets, so no division is
done per segment.
"""
import math

import numpy as np
from numba import njit

WHEEL = (3, 5, 7, 11, 13)
WHEEL_PERIOD = 3 * 5 * 7 * 11 * 13


def _make_pattern():
    pat = np.ones(WHEEL_PERIOD, dtype=np.uint8)
    for p in WHEEL:
        # odd index k <-> number 2k+1; p | 2k+1 first at k = (p-1)/2
        pat[(p - 1) // 2 :: p] = 0
    return np.concatenate([pat, pat])


PATTERN = _make_pattern()


def small_primes(limit):
    """Plain Eratosthenes up to ``limit`` (inclusive) as int64."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def base_primes(hi):
    """Odd primes above the wheel needed to sieve up to ``hi``."""
    ps = small_primes(math.isqrt(max(hi, 0)) + 1)
    return ps[ps > WHEEL[-1]]


@njit(cache=True, nogil=True)
def init_carry(base, g0):
    """Offset (in odd indices, relative to ``g0``) of each prime's next multiple."""
    first = 2 * g0 + 1
    nxt = np.empty(base.shape[0], dtype=np.int64)
    for i in range(base.shape[0]):
        p = base[i]
        m = p * p
        if m < first:
            m = ((first + p - 1) // p) * p
            if m % 2 == 0:
                m += p
        nxt[i] = (m - first) // 2
    return nxt


@njit(cache=True, nogil=True)
def make_template(pattern, seg_odd, g0):
    """Wheel stamp for segments of ``seg_odd`` odds starting at ``g0``.

    Only reusable across segments when ``seg_odd`` is a multiple of the
    wheel period (then every segment starts at the same wheel phase).
    """
    period = pattern.shape[0] // 2
    tpl = np.empty(seg_odd, dtype=np.uint8)
    off = g0 % period
    pos = 0
    while pos < seg_odd:
        ln = min(period, seg_odd - pos)
        for t in range(ln):
            tpl[pos + t] = pattern[off + t]
        pos += ln
    return tpl


@njit(cache=True, nogil=True)
def sieve_segment(seg, nodd, g0, pattern, template, base, nxt):
    """Fill ``seg[:nodd]`` with primality flags of the odd numbers from 2*g0+1.

    ``template`` is a phase-aligned wheel stamp (see ``make_template``) or an
    empty array, in which case the stamp is rebuilt from ``pattern``.
    """
    if template.shape[0] >= nodd:
        for t in range(nodd):
            seg[t] = template[t]
    else:
        period = pattern.shape[0] // 2
        off = g0 % period
        pos = 0
        while pos < nodd:
            ln = min(period, nodd - pos)
            for t in range(ln):
                seg[pos + t] = pattern[off + t]
            pos += ln
    # wheel primes themselves, and 1
    if g0 < 7:
        for q in (3, 5, 7, 11, 13):
            k = (q - 1) // 2 - g0
            if 0 <= k < nodd:
                seg[k] = 1
        if g0 == 0 and nodd > 0:
            seg[0] = 0
    for i in range(base.shape[0]):
        j = nxt[i]
        if j >= nodd:
            nxt[i] = j - nodd
            continue
        p = base[i]
        while j < nodd:
            seg[j] = 0
            j += p
        nxt[i] = j - nodd


@njit(cache=True, nogil=True)
def _template_for(pattern, seg_odd, ga):
    period = pattern.shape[0] // 2
    if seg_odd % period == 0:
        return make_template(pattern, seg_odd, ga)
    return np.empty(0, dtype=np.uint8)


@njit(cache=True, nogil=True)
def _odd_span(lo, hi):
    # odd numbers in [lo, hi]: global odd indices [ga, gb)
    ga = lo // 2
    gb = (hi + 1) // 2
    if ga < 0:
        ga = 0
    return ga, gb


@njit(cache=True, nogil=True)
def count_marks(lo, marks, base, pattern, seg_odd):
    """Cumulative counts of primes in [lo, marks[k]] for ascending ``marks``.

    Requires lo >= 1 and marks[-1] >= lo. The prime 2 is included when lo <= 2.
    """
    out = np.zeros(marks.shape[0], dtype=np.int64)
    if marks.shape[0] == 0:
        return out
    hi = marks[-1]
    ga, gb = _odd_span(lo, hi)
    nxt = init_carry(base, ga)
    seg = np.empty(seg_odd, dtype=np.uint8)
    tpl = _template_for(pattern, seg_odd, ga)
    total = 0
    if lo <= 2:
        total = 1 if hi >= 2 else 0
    k = 0
    # marks below the first odd candidate, or below 2
    while k < marks.shape[0] and (marks[k] < 2 * ga + 1 or marks[k] < 2):
        out[k] = 1 if (lo <= 2 and marks[k] >= 2) else 0
        k += 1
    g = ga
    while g < gb and k < marks.shape[0]:
        nodd = min(seg_odd, gb - g)
        sieve_segment(seg, nodd, g, pattern, tpl, base, nxt)
        seg_last = 2 * (g + nodd - 1) + 1
        i = 0
        while k < marks.shape[0] and marks[k] <= seg_last:
            # odd numbers <= marks[k] inside this segment: indices < stop
            stop = (marks[k] + 1) // 2 - g
            for t in range(i, stop):
                total += seg[t]
            i = stop
            out[k] = total
            k += 1
        for t in range(i, nodd):
            total += seg[t]
        g += nodd
    while k < marks.shape[0]:
        out[k] = total
        k += 1
    return out


@njit(cache=True, nogil=True)
def theta_partials(lo, hi, base, pattern, seg_odd, modulus, residue):
    """Per-segment sums of log p over primes p in [lo, hi] with p % modulus == residue."""
    ga, gb = _odd_span(lo, hi)
    nseg = (gb - ga + seg_odd - 1) // seg_odd
    out = np.zeros(nseg + 1, dtype=np.float64)
    if lo <= 2 <= hi and 2 % modulus == residue:
        out[nseg] = math.log(2.0)
    nxt = init_carry(base, ga)
    seg = np.empty(seg_odd, dtype=np.uint8)
    tpl = _template_for(pattern, seg_odd, ga)
    g = ga
    s = 0
    while g < gb:
        nodd = min(seg_odd, gb - g)
        sieve_segment(seg, nodd, g, pattern, tpl, base, nxt)
        acc = 0.0
        if modulus == 1:
            for t in range(nodd):
                if seg[t]:
                    acc += math.log(2.0 * (g + t) + 1.0)
        else:
            for t in range(nodd):
                if seg[t]:
                    n = 2 * (g + t) + 1
                    if n % modulus == residue:
                        acc += math.log(float(n))
        out[s] = acc
        s += 1
        g += nodd
    return out


@njit(cache=True, nogil=True)
def collect_primes(lo, hi, base, pattern, seg_odd):
    """All primes in [lo, hi] as an ascending int64 array."""
    ga, gb = _odd_span(lo, hi)
    cap = 16
    out = np.empty(cap, dtype=np.int64)
    n = 0
    if lo <= 2 <= hi:
        out[0] = 2
        n = 1
    nxt = init_carry(base, ga)
    seg = np.empty(seg_odd, dtype=np.uint8)
    tpl = _template_for(pattern, seg_odd, ga)
    g = ga
    while g < gb:
        nodd = min(seg_odd, gb - g)
        sieve_segment(seg, nodd, g, pattern, tpl, base, nxt)
        for t in range(nodd):
            if seg[t]:
                if n == cap:
                    cap *= 2
                    tmp = np.empty(cap, dtype=np.int64)
                    tmp[:n] = out[:n]
                    out = tmp
                out[n] = 2 * (g + t) + 1
                n += 1
        g += nodd
    return out[:n].copy()


@njit(cache=True, nogil=True)
def squarefree_flags(lo, hi, sq_primes):
    """flags[i] == 1 iff lo + i is squarefree, for i in [0, hi - lo]."""
    n = hi - lo + 1
    flags = np.ones(n, dtype=np.uint8)
    for i in range(sq_primes.shape[0]):
        p = sq_primes[i]
        q = p * p
        if q > hi:
            break
        start = ((lo + q - 1) // q) * q
        for j in range(start - lo, n, q):
            flags[j] = 0
    if lo == 0:
        flags[0] = 0
    return flags
