import math

import numpy as np
import pytest

from gevreylab.errors import PreconditionError, SolveError, StructuralError
from gevreylab.io import result_from_document, result_to_document
from gevreylab.normalization import (assemble_tQ, check_monomial_preservation, choose_c0,
                                     coefficient_ode_residual, compute_borel_tables,
                                     conjugacy_residual, derivative_shift, formal_normalize,
                                     ramify_sigma_k, route_equivalence, solve_borel_W, solve_gQ_ode,
                                     verify_bounds)
from gevreylab.series_core import ZSeries
from gevreylab.small_divisors import rho_sequence


def euler_coeffs(M):
    return np.array([0] + [(-1) ** (n - 1) * math.factorial(n - 1) for n in range(1, M + 1)])


def test_solve_gQ_ode_euler_exact():
    g = solve_gQ_ode(1, 0, [1], 1, 18)
    assert np.array_equal(g.real.astype(np.int64), euler_coeffs(18))
    assert coefficient_ode_residual(1, 0, [1], solve_gQ_ode(1, 0, [1], 1, 20), 1) < 1e-12


def test_solve_gQ_ode_resonant_division():
    # (n + 1/2) g_n = t_n
    assert np.allclose(solve_gQ_ode(0, 0.5, [1], 1, 4), [2, 0, 0, 0, 0])
    assert np.allclose(solve_gQ_ode(0, 0.5, [0, 1], 1, 4), [0, 2 / 3, 0, 0, 0])
    assert not np.any(solve_gQ_ode(0.7, 0.2, np.zeros(5), 1, 6))


def test_solve_gQ_ode_zero_divisor_names_location():
    with pytest.raises(SolveError) as err:
        solve_gQ_ode(0, -2, [1], 1, 5, where=(1, (2, 1)))
    assert (err.value.i, err.value.Q, err.value.n) == (1, (2, 1), 2)


def test_solve_gQ_ode_k2():
    # z^3 g' + (1 + z^2) g = z^2: g_n = t_{n-2} - (n-2+alpha) g_{n-2}
    g = solve_gQ_ode(1, 0, [1], 2, 8)
    assert np.allclose(g, [0, 0, 1, 0, -2, 0, 8, 0, -48])


def test_identity_for_zero_nonlinearity(corpus):
    res = formal_normalize(corpus["zero2d"])
    b = res.basis
    for pos, Q in enumerate(b.indices):
        if sum(Q) >= 2:
            assert not np.any(res.g[pos])
    assert conjugacy_residual(res.spec, res) == 0.0
    assert check_monomial_preservation(res) == 0.0


def test_linear_rows_are_identity(euler2d_result):
    assert np.array_equal(euler2d_result.g_series((1, 0))[:, 0], [1, 0])
    assert np.array_equal(euler2d_result.g_series((0, 1))[:, 0], [0, 1])
    for Q, t in euler2d_result.t_table().items():
        if sum(Q) <= 1:
            assert not np.any(t)


def test_hand_recursion_euler2d(euler2d_result):
    g20 = euler2d_result.g_series((2, 0))[0]
    assert np.array_equal(g20.real, euler_coeffs(12))
    g11 = euler2d_result.g_series((1, 1))[0]
    assert np.array_equal(g11.real, [0] + [-math.factorial(n) for n in range(1, 13)])
    # resonant (i=1, Q=(2,1)): lambda_Q = 0, alpha_Q = 1, g_n = t_n / (n + 1)
    t = euler2d_result.t_table()[(2, 1)][0]
    assert np.allclose(euler2d_result.g_series((2, 1))[0], t / (np.arange(13) + 1))


def test_hand_division_smalldiv3d(smalldiv3d_result):
    g = smalldiv3d_result.g_series((1, 0, 1))[0]
    assert g[1] == pytest.approx(1 / math.sqrt(2))
    assert g[2] == pytest.approx(-1.0)


def test_assemble_tQ_grading(euler2d, euler2d_result):
    table = {Q: v.copy() for Q, v in euler2d_result.g_table().items()}
    base = assemble_tQ(table, euler2d, (2, 2), 12)
    assert np.allclose(base, euler2d_result.t_table()[(2, 2)])
    for Q in table:
        if sum(Q) >= 4:
            table[Q] = np.full_like(table[Q], 99.0)
    assert np.array_equal(assemble_tQ(table, euler2d, (2, 2), 12), base)
    assert not np.any(assemble_tQ(table, euler2d, (1, 0), 12))
    del table[(1, 1)]
    with pytest.raises(StructuralError):
        assemble_tQ(table, euler2d, (2, 1), 12)


def test_determinism(corpus):
    a = formal_normalize(corpus["smalldiv3d"], 6, 10)
    b = formal_normalize(corpus["smalldiv3d"], 6, 10)
    assert np.array_equal(a.g, b.g)


def test_permuted_coordinates(corpus):
    spec = corpus["smalldiv3d"]
    perm = [2, 0, 1]
    a = formal_normalize(spec, 5, 8)
    b = formal_normalize(spec.permuted(perm), 5, 8)
    moved = np.zeros_like(b.g)
    for Q, v in a.g_table().items():
        moved[b.position(tuple(Q[p] for p in perm))] = v[perm]
    scale = np.abs(b.g).max(axis=(0, 1))
    assert np.all(np.abs(moved - b.g).max(axis=(0, 1)) <= 1e-12 * scale)


def test_w_table_valuation(euler2d_result):
    for Q, w in euler2d_result.w_table().items():
        assert not np.any(w[:, :sum(Q)])


@pytest.mark.parametrize("name", ["euler2d", "euler2d_k2", "smalldiv3d", "poincare", "h5ok",
                                  "h5bad", "zero2d"])
def test_conjugacy_residual_corpus(corpus, name):
    spec = corpus[name]
    res = formal_normalize(spec, 8, 12)
    assert conjugacy_residual(spec, res) < 1e-9


def test_h3_violation_raises(corpus):
    with pytest.raises(SolveError) as err:
        formal_normalize(corpus["h3violation"])
    assert (err.value.i, err.value.Q, err.value.n) == (1, (2, 1), 1)


def test_monomial_preservation(corpus):
    assert check_monomial_preservation(formal_normalize(corpus["h5ok"])) < 1e-10
    assert check_monomial_preservation(formal_normalize(corpus["h5bad"])) > 1e-4
    with pytest.raises(PreconditionError):
        check_monomial_preservation(formal_normalize(corpus["poincare"]))


def test_ramify_examples():
    assert np.array_equal(ramify_sigma_k(ZSeries([0, 0, 1]), 2).coeffs, [0, 1])
    assert np.array_equal(ramify_sigma_k(ZSeries([0, 0, 1, 0, 3]), 2).coeffs, [0, 1, 3])
    w = ZSeries(np.eye(13)[6] + 2 * np.eye(13)[9])
    assert ramify_sigma_k(w, 3).valuation == 2
    with pytest.raises(PreconditionError, match="exponent 3"):
        ramify_sigma_k(ZSeries([0, 0, 1, 1]), 2)


def test_borel_scalar_euler():
    # (t+1) W' + 0 W = 1  ->  W = log(1+t);  W' = 1/(1+t)
    W = solve_borel_W(1, -1, np.eye(10)[0], 1, 1)
    assert np.allclose(W[1:], [(-1) ** (n - 1) / n for n in range(1, 10)])
    assert np.allclose(derivative_shift(W, 1), [(-1) ** n for n in range(9)])


def test_borel_euler_component(euler2d_result):
    G = euler2d_result.borel.G[(2, 0)][0]
    assert np.allclose(G[:12], [(-1) ** n for n in range(12)])


@pytest.mark.parametrize("name", ["euler2d", "euler2d_k2", "smalldiv3d", "poincare", "h5ok", "zero2d"])
def test_w_zero_order_and_route_equivalence(corpus, name):
    res = formal_normalize(corpus[name], 6, 12)
    tables = compute_borel_tables(res)
    scale = np.abs(tables.W).max()
    for pos, Q in enumerate(res.basis.indices):
        m = sum(Q)
        if m >= 2:
            assert np.abs(tables.W[pos, :, :m - 1]).max(initial=0) <= 1e-12 * scale
    assert route_equivalence(res, tables) < 1e-10


def test_verify_bounds_examples(corpus, euler2d_result, smalldiv3d_result):
    zero = formal_normalize(corpus["zero2d"])
    assert verify_bounds(zero, c=1, gamma=0).K0_fit == 1
    bf = verify_bounds(euler2d_result, rho=rho_sequence(euler2d_result.spec.linear_part, 8).at)
    assert bf.K_fit == pytest.approx(2, rel=0.01)
    lp3 = smalldiv3d_result.spec.linear_part
    bf3 = verify_bounds(smalldiv3d_result, rho=rho_sequence(lp3, 8).at)
    assert np.isfinite(bf3.K0_fit) and bf3.K0_fit > 0 and np.isfinite(bf3.K_fit)


def test_choose_c0_halves():
    assert choose_c0(1.0) == 0.5
    assert choose_c0(5.0) < 0.5


def test_result_json_round_trip(euler2d_result):
    back = result_from_document(result_to_document(euler2d_result))
    assert np.array_equal(back.g, euler2d_result.g)
    assert np.array_equal(back.lambda_Q, euler2d_result.lambda_Q)
