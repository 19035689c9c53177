from fractions import Fraction
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gevreylab.errors import DimensionError, PreconditionError
from gevreylab.series_core import (SCALAR, BorelRing, BorelSeries, MonomialBasis, MultiSeries,
                                   ZRing, ZSeries, beta_weight, compositions, conv, monomial_count,
                                   ms_add, ms_mul, ms_substitute, multi_indices, zs_add, zs_mul)


def x(i, dim=2, order=4, ring=SCALAR):
    return MultiSeries.variable(dim, order, i, ring)


def const(c, dim=2, order=4):
    return MultiSeries.from_terms(dim, order, {(0,) * dim: c})


def test_enumeration_is_graded_and_complete():
    idx = multi_indices(3, 4)
    degrees = [sum(q) for q in idx]
    assert degrees == sorted(degrees)
    assert len(idx) == len(set(idx)) == sum(monomial_count(3, m) for m in range(5))
    assert multi_indices(2, 3, min_degree=2)[0] == (2, 0)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_monomial_count_bound(n):
    for m in range(13):
        assert compositions(m, n).shape[0] <= 2 ** (n + m - 1)


def test_add_examples():
    s = x(0) + x(1)
    assert s.terms() == {(1, 0): 1, (0, 1): 1}
    a = x(0) * 3.0
    assert np.array_equal((a + MultiSeries.zeros(2, 4)).coeffs, a.coeffs)
    sq = ms_mul(x(0), x(0)) * 2.0
    assert (sq + (-sq)).terms() == {}


def test_mul_examples():
    assert ms_mul(x(0), x(1)).terms() == {(1, 1): 1}
    p = ms_mul(const(1) + x(0), const(1) - x(0))
    assert p.terms() == {(0, 0): 1, (2, 0): -1}
    s = x(0) + x(1)
    assert ms_mul(s, s).terms() == {(2, 0): 1, (1, 1): 2, (0, 2): 1}


def test_mul_truncates_to_min_order():
    a = MultiSeries.variable(2, 3, 0)
    b = MultiSeries.variable(2, 5, 1)
    assert ms_mul(a, b).order == 3
    with pytest.raises(DimensionError):
        ms_add(MultiSeries.variable(2, 3, 0), MultiSeries.variable(3, 3, 0))


def test_substitute_examples():
    f = ms_mul(x(0), x(0))
    out = ms_substitute(f, [x(0) + x(1), x(1)])
    assert out.terms() == {(2, 0): 1, (1, 1): 2, (0, 2): 1}
    g = ms_mul(x(0), x(1)) + x(0) * 2.0 + ms_mul(ms_mul(x(1), x(1)), x(0))
    same = ms_substitute(g, [x(0), x(1)])
    assert np.array_equal(same.coeffs, g.coeffs)
    assert ms_substitute(ms_mul(x(0), x(1)), [x(0), MultiSeries.zeros(2, 4)]).terms() == {}


def test_substitute_rejects_constant_term():
    with pytest.raises(PreconditionError):
        ms_substitute(x(0), [const(1) + x(0), x(1)])


def test_zseries_examples():
    z = ZSeries([0, 1, 0, 0])
    assert np.array_equal(zs_mul(z, z).coeffs, [0, 0, 1, 0])
    one_z = ZSeries([1, 1, 0, 0])
    assert np.array_equal((one_z * one_z).coeffs, [1, 2, 1, 0])
    geo = ZSeries(np.ones(10))
    assert np.allclose(zs_mul(geo, ZSeries([1, -1] + [0] * 8)).coeffs, [1] + [0] * 9)
    assert ZSeries([0, 0, 3]).valuation == 2


def test_convolution_examples():
    unit = BorelSeries(1, [1, 0, 0, 0])
    assert np.allclose(conv(unit, unit).coeffs, [0, 1, 0, 0])
    t = BorelSeries(1, [0, 1, 0, 0, 0])
    assert np.allclose(conv(t, t).coeffs, [0, 0, 0, 1 / 6, 0])
    for m in range(1, 6):
        tm = np.zeros(8)
        tm[m - 1] = 1
        out = conv(BorelSeries(1, np.eye(8)[0]), BorelSeries(1, tm)).coeffs
        assert out[m] == pytest.approx(1 / m, rel=1e-15)


def test_beta_weight_general_k():
    # t^p * t^q = B((p+k)/k, (q+k)/k) t^(p+q+k); k=2, p=q=0 gives B(1,1)=1
    assert beta_weight(0, 0, 2) == pytest.approx(1.0)
    assert beta_weight(2, 2, 2) == pytest.approx(1 / 6)


def test_borel_series_rejects_low_valuation():
    with pytest.raises(PreconditionError):
        BorelSeries(2, [1.0], source_valuation=1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.lists(st.floats(-3, 3), min_size=6, max_size=6),
       st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_convolution_commutative_associative(a, b, c):
    A, B, C = (BorelSeries(1, v) for v in (a, b, c))
    ab, ba = conv(A, B).coeffs, conv(B, A).coeffs
    scale = max(np.abs(ab).max(), 1e-300)
    assert np.max(np.abs(ab - ba)) <= 1e-12 * scale
    left, right = conv(conv(A, B), C).coeffs, conv(A, conv(B, C)).coeffs
    scale = max(np.abs(left).max(), 1.0)
    assert np.max(np.abs(left - right)) <= 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=10, max_size=10),
       st.lists(st.floats(-2, 2), min_size=10, max_size=10))
def test_multiseries_ring_laws(a, b):
    basis = MonomialBasis.get(3, 2)
    A = MultiSeries(3, 2, np.array(a, dtype=complex), SCALAR)
    B = MultiSeries(3, 2, np.array(b, dtype=complex), SCALAR)
    assert np.allclose(ms_mul(A, B).coeffs, ms_mul(B, A).coeffs)
    one = MultiSeries.from_terms(3, 2, {(0, 0, 0): 1})
    assert np.array_equal(ms_mul(A, one).coeffs, A.coeffs)
    assert len(basis) == 10


def test_zring_distributes():
    rng = np.random.default_rng(0)
    a, b, c = (ZSeries(rng.normal(size=8)) for _ in range(3))
    lhs = zs_mul(a, zs_add(b, c)).coeffs
    rhs = zs_add(zs_mul(a, b), zs_mul(a, c)).coeffs
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


def test_borel_ring_exact_weights():
    ring = BorelRing(41)
    for p in range(21):
        for q in range(21):
            a = np.zeros(42)
            b = np.zeros(42)
            a[p] = 1
            b[q] = 1
            got = ring.mul(a, b)[p + q + 1].real
            want = Fraction(factorial(p) * factorial(q), factorial(p + q + 1))
            assert abs(got - float(want)) <= 1e-14 * float(want)


def test_zring_multiseries_coefficients():
    ring = ZRing(3)
    a = MultiSeries.from_terms(2, 2, {(1, 0): [0, 1, 0, 0]}, ring)
    sq = ms_mul(a, a)
    assert np.array_equal(sq.coefficient((2, 0)), [0, 0, 1, 0])
