import math

import numpy as np
import pytest

from explicit_primes import zeros


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def brute_mu2(n: int) -> bool:
    """Squarefree by summing mu(a) over a^2 | n."""
    if n == 0:
        return False
    total = 0
    a = 1
    while a * a <= n:
        if n % (a * a) == 0:
            total += brute_mobius(a)
        a += 1
    return total == 1


def brute_mobius(n: int) -> int:
    k = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            k += 1
        d += 1
    if n > 1:
        k += 1
    return -1 if k % 2 else 1


def oracle_arrays(N: int):
    """Primality, pi, theta and psi up to N by plain Eratosthenes (numpy)."""
    isp = np.ones(N + 1, dtype=bool)
    isp[:2] = False
    for p in range(2, math.isqrt(N) + 1):
        if isp[p]:
            isp[p * p :: p] = False
    lam = np.zeros(N + 1)
    for p in np.flatnonzero(isp).tolist():
        q = p
        while q <= N:
            lam[q] = math.log(p)
            q *= p
    return isp, np.cumsum(isp), np.cumsum(np.where(isp, lam, 0.0)), np.cumsum(lam)


@pytest.fixture(scope="session")
def zero_table():
    return zeros.default_zeros()


@pytest.fixture(scope="session")
def oracle_1e5():
    return oracle_arrays(10**5)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if not mod or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
