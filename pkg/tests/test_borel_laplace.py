import math

import numpy as np
import pytest
from scipy.special import exp1

from gevreylab.borel_laplace import (SectorSpec, asymptotic_residual_scan, blocking_poles,
                                     borel_k_formal, borel_sum, direction_usable, gevrey_fit,
                                     gevrey_order_of_normalization, laplace_k_numeric,
                                     pade_continue, power_sum_envelope)
from gevreylab.errors import FitDomainError, PreconditionError, SummationDirectionError
from gevreylab.normalization import formal_normalize
from gevreylab.series_core import BorelSeries, ZSeries

EULER_ORACLE = math.exp(10) * exp1(10)


def euler_series(M=20, sign=-1):
    return ZSeries([0] + [sign ** (n - 1) * math.factorial(n - 1) for n in range(1, M + 1)])


def test_borel_formal_examples():
    b = borel_k_formal(euler_series(15, sign=1), 1)
    assert np.allclose(b.coeffs, 1)
    for k in (1, 2, 3):
        assert np.allclose(borel_k_formal(ZSeries(np.eye(6)[k]), k).coeffs[0], 1)
    b2 = borel_k_formal(ZSeries([0, 0, 0, 1]), 2)
    assert np.allclose(b2.coeffs, [0, 2 / math.sqrt(math.pi)])
    with pytest.raises(PreconditionError):
        borel_k_formal(ZSeries([0, 1, 1]), 2)


def test_borel_formal_linear():
    rng = np.random.default_rng(1)
    f, g = (np.concatenate([[0, 0], rng.normal(size=8)]) for _ in range(2))
    lhs = borel_k_formal(ZSeries(2 * f - 3 * g), 2).coeffs
    rhs = 2 * borel_k_formal(ZSeries(f), 2).coeffs - 3 * borel_k_formal(ZSeries(g), 2).coeffs
    assert np.array_equal(lhs, rhs) or np.allclose(lhs, rhs, rtol=1e-15, atol=0)


def test_pade_examples():
    p = pade_continue(BorelSeries(1, [1, -1]), 0, 1)
    assert np.allclose(p.denominator, [1, 1]) and np.allclose(p.poles, [-1])
    poly = BorelSeries(1, [1, 2, 3])
    assert np.array_equal(pade_continue(poly, 2, 0).numerator, poly.coeffs)
    q = pade_continue(BorelSeries(1, [1, 1]), 0, 1)
    assert np.allclose(q.poles, [1])
    assert not direction_usable(q, 0.0)
    assert blocking_poles(q, 0.0) == [pytest.approx(1)]
    assert direction_usable(q, math.pi / 2) and direction_usable(q, math.pi)


def test_pade_rank_fallback():
    p = pade_continue(BorelSeries(1, [(-1) ** n for n in range(13)]))
    assert p.M == 1 and p.diagnostics
    assert np.allclose(p.poles, [-1])


def test_laplace_examples():
    one = BorelSeries(1, [1.0])
    assert laplace_k_numeric(one, 1, 0.0, 0.3) == pytest.approx(0.3, rel=1e-10)
    t = BorelSeries(1, [0.0, 1.0])
    assert laplace_k_numeric(t, 1, 0.0, 0.3) == pytest.approx(0.09, rel=1e-10)
    z = 0.2 * np.exp(0.3j)
    assert laplace_k_numeric(one, 2, 0.3, z) == pytest.approx(z ** 2, rel=1e-10)
    val, err = laplace_k_numeric(lambda s: 1 / (1 + s), 1, 0.0, 0.1, full_output=True)
    assert abs(val - EULER_ORACLE) < 1e-10 and err < 1e-8


def test_laplace_errors():
    one = BorelSeries(1, [1.0])
    with pytest.raises(SummationDirectionError, match="outside summation sector"):
        laplace_k_numeric(one, 1, 0.0, -0.1)
    q = pade_continue(BorelSeries(1, [1, 1]), 0, 1)
    with pytest.raises(SummationDirectionError) as err:
        laplace_k_numeric(q, 1, 0.05, 0.1)
    assert err.value.pole == pytest.approx(1)


def test_borel_sum_examples():
    assert abs(borel_sum(euler_series(), 1, 0.0, 0.1) - EULER_ORACLE) < 1e-6
    f = ZSeries([0, 1] + [0] * 20)
    assert abs(borel_sum(f, 1, 0.0, 0.05) - 0.05) < 1e-8
    with pytest.raises(SummationDirectionError, match="outside summation sector"):
        borel_sum(euler_series(), 1, 0.0, -0.1)


@pytest.mark.parametrize("k", [1, 2])
def test_round_trip_polynomials(k):
    rng = np.random.default_rng(k)
    c = np.concatenate([np.zeros(k), rng.normal(size=5)])
    for z in (0.2, 0.15 * np.exp(0.2j)):
        want = np.polynomial.polynomial.polyval(z, c)
        got = borel_sum(ZSeries(c), k, float(np.angle(z)), z, polynomial=True)
        assert abs(got - want) < 1e-8
    padded = ZSeries(np.concatenate([c, np.zeros(12)]))
    assert abs(borel_sum(padded, k, 0.0, 0.2) - np.polynomial.polynomial.polyval(0.2, c)) < 1e-8


def test_low_order_terms_are_kept():
    f = ZSeries([2.0, 1.0, 0, 0, 0, 0, 0, 0])
    assert borel_sum(f, 2, 0.0, 0.3) == pytest.approx(2.3)


@pytest.mark.parametrize("theta", [0.2, -0.2])
def test_direction_covariance(theta):
    f = euler_series()
    rotated = ZSeries(f.coeffs * np.exp(-1j * theta * np.arange(f.coeffs.size)))
    base = borel_sum(f, 1, 0.0, 0.1)
    moved = borel_sum(rotated, 1, theta, 0.1 * np.exp(1j * theta))
    assert abs(moved - base) < 1e-8


def test_gevrey_fit_examples():
    N = np.arange(0, 41)
    fit = gevrey_fit([math.gamma(1 + n) for n in N])
    assert fit.s_hat == pytest.approx(1, abs=1e-6) and fit.A_hat == pytest.approx(1, rel=1e-6)
    two = gevrey_fit(np.exp([math.lgamma(1 + 2 * n) + n * math.log(3) for n in N]))
    assert two.s_hat == pytest.approx(2, abs=0.02) and two.A_hat == pytest.approx(3, rel=0.02)
    flat = gevrey_fit(np.ones(30))
    assert flat.s_hat == pytest.approx(0, abs=1e-9)


def test_gevrey_fit_scale_consistent():
    N = np.arange(5, 41)
    data = np.exp([math.lgamma(1 + 1.3 * n) + n * 0.4 for n in N]) * (1 + 0.01 * np.sin(N))
    a = gevrey_fit(data, N=N)
    b = gevrey_fit(17.0 * data, N=N)
    assert abs(a.s_hat - b.s_hat) < 1e-9 and abs(a.A_hat - b.A_hat) < 1e-9 * a.A_hat
    assert b.C_hat == pytest.approx(17 * a.C_hat, rel=1e-9)


def test_gevrey_fit_flags():
    assert "low confidence" in gevrey_fit([1, 2, 6, 24, 120, 720, 5040]).flag
    assert gevrey_fit(np.zeros(10)).flag


def test_gevrey_order_of_normalization(corpus, euler2d_result):
    zero = gevrey_order_of_normalization(formal_normalize(corpus["zero2d"]), 0.5)
    assert zero.s_hat == 0
    fit = gevrey_order_of_normalization(euler2d_result, 0.5)
    assert 0.8 <= fit.s_hat <= 1.2
    assert fit.predicted == pytest.approx(1.0)
    with pytest.raises(FitDomainError, match="reduce R"):
        gevrey_order_of_normalization(euler2d_result, 20.0)


def test_residual_scan_euler():
    f = euler_series(12)
    zs = [0.05, 0.1]
    tab = asymptotic_residual_scan(lambda z: borel_sum(euler_series(), 1, 0.0, z), f.coeffs, zs, 8)
    for N in range(1, 9):
        bound = math.factorial(N - 1)
        assert np.all(tab[N - 1] <= bound * (1 + 1e-6))
        assert np.all(tab[N - 1] >= 0.3 * bound)


def test_residual_scan_convergent():
    c = 0.5 ** np.arange(15)
    g = lambda z: 1 / (1 - z / 2)  # noqa: E731
    tab = asymptotic_residual_scan(g, c, [0.1, 0.2 * np.exp(1j)], 12)
    assert tab[0].max() < 1
    assert gevrey_fit(tab.max(axis=1), N=np.arange(1, 13)).s_hat < 0.05


def test_power_sum_envelope():
    env = power_sum_envelope(0.5)
    assert env.holds and np.isfinite(env.C3) and np.isfinite(env.C4)


def test_sector_spec():
    s = SectorSpec(0.0, 0.5, 1.0)
    assert s.contains(0.3) and not s.contains(-0.3) and not s.contains(2.0)
    assert all(s.contains(z) for z in s.sample())
    with pytest.raises(ValueError):
        SectorSpec(0.0, 4.0, 1.0)
