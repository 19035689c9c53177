"""Formal linearizing transformation of an irregular singular system.

For ``z**(k+1) x' = (Lambda + z**k A) x + z**k f(z, x)`` we look for
``x = y + g(z, y)`` with ``g = sum_{|Q|>=2} g_Q(z) y**Q`` such that ``y``
solves the linear system.  Matching the coefficient of ``y**Q`` gives, per
component ``i``,

    z**(k+1) g_Q' + (lambda_Q + z**k alpha_Q) g_Q = z**k t_Q,

with ``lambda_Q = (Q, lambda) - lambda_i``, ``alpha_Q = (Q, alpha) - alpha_i``
and ``t_Q`` the coefficient of ``y**Q`` in ``f(z, y + g)``.  Because
``t_Q`` only involves ``g_P`` with ``|P| < |Q|``, the table is filled one
degree shell at a time.

The same recursion is mirrored in the Borel plane: ``W_Q`` is the Borel
transform of ``w_Q = z**(k|Q|) g_Q`` and solves a first order linear ODE in
``t`` whose right-hand side is a convolution polynomial in lower ``W_P``.
For ``k > 1`` the z-variable is first ramified (``z -> z**(1/k)``).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, inf
from typing import Callable, Sequence

import numpy as np

from .errors import PreconditionError, SolveError, StructuralError
from .resonance import DEFAULT_EPS, H3_INTEGRALITY_TOL, VectorFieldSpec
from .series_core import (BorelRing, BorelSeries, MonomialBasis, MultiSeries, ZRing, ZSeries,
                          ms_monomial_powers)

__all__ = [
    "NormalizationResult", "BorelTables", "BoundFit",
    "solve_gQ_ode", "assemble_tQ", "formal_normalize", "coefficient_ode_residual",
    "conjugacy_residual", "check_monomial_preservation",
    "solve_borel_W", "derivative_shift", "compute_borel_tables", "borel_recurrence",
    "route_equivalence", "ramify_sigma_k", "choose_c0", "verify_bounds", "disk_max",
]


# ---------------------------------------------------------------------------
# scalar coefficient equations

def solve_gQ_ode(lambda_Q: complex, alpha_Q: complex, tQ, k: int, M: int,
                 where=(None, None), eps: float = DEFAULT_EPS,
                 int_tol: float = H3_INTEGRALITY_TOL) -> np.ndarray:
    """Formal solution of ``z**(k+1) g' + (lambda_Q + z**k alpha_Q) g = z**k t``.

    Returns the coefficients ``g_0..g_M``.  The coefficient of ``z**n`` reads
    ``lambda_Q g_n + (n - k + alpha_Q) g_{n-k} = t_{n-k}``: a forward
    recursion when ``lambda_Q != 0``, and a pure division
    ``g_n = t_n / (n + alpha_Q)`` in the resonant case.

    Raises
    ------
    SolveError
        When ``lambda_Q = 0`` and ``n + alpha_Q`` vanishes for some
        ``0 <= n <= M``; ``where = (i, Q)`` labels the error.
    """
    t = np.zeros(M + 1, dtype=complex)
    tQ = np.asarray(tQ, dtype=complex).reshape(-1)[:M + 1]
    t[:tQ.size] = tQ
    g = np.zeros(M + 1, dtype=complex)
    if abs(lambda_Q) > eps:
        for n in range(k, M + 1):
            g[n] = (t[n - k] - (n - k + alpha_Q) * g[n - k]) / lambda_Q
        return g
    for n in range(M + 1):
        d = n + alpha_Q
        if abs(d) < int_tol:
            i, Q = where
            raise SolveError(i, Q if Q is not None else (), n, "H3 violated: n + alpha_Q = 0")
        g[n] = t[n] / d
    return g


def coefficient_ode_residual(lambda_Q, alpha_Q, tQ, g, k: int, scale_t=None) -> float:
    """Largest relative coefficient residual of the g_Q equation.

    Each coefficient of ``z**(k+1) g' + (lambda_Q + z**k alpha_Q) g - z**k t``
    is divided by the largest magnitude among its four contributions
    (``scale_t`` optionally replaces ``|t|`` by an a-priori magnitude of the
    terms summed into ``t``).
    """
    g = np.asarray(g, dtype=complex)
    M = g.size - 1
    t = np.zeros(M + 1, dtype=complex)
    tQ = np.asarray(tQ, dtype=complex).reshape(-1)[:M + 1]
    t[:tQ.size] = tQ
    st = np.abs(t) if scale_t is None else np.asarray(scale_t, dtype=float)[:M + 1]
    n = np.arange(M + 1)
    shifted = np.zeros(M + 1, dtype=complex)
    shifted[k:] = g[:M + 1 - k]
    t_sh = np.zeros(M + 1, dtype=complex)
    t_sh[k:] = t[:M + 1 - k]
    st_sh = np.zeros(M + 1)
    st_sh[k:] = st[:M + 1 - k]
    a = (n - k) * shifted
    b = lambda_Q * g
    c = alpha_Q * shifted
    res = np.abs(a + b + c - t_sh)
    scale = np.max(np.vstack([np.abs(a), np.abs(b), np.abs(c), np.abs(t_sh), st_sh]), axis=0)
    ok = scale > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(res[ok] / scale[ok]))


# ---------------------------------------------------------------------------
# result container

@dataclass
class NormalizationResult:
    """Coefficient tables of the normalizing transformation.

    ``g[pos, i, n]`` is the ``z**n`` coefficient of ``g_{i,Q}`` for
    ``Q = basis.indices[pos]``; rows of degree one hold the identity
    (``g_{e_l} = e_l``) and the degree-zero row is zero.  ``t`` has the same
    layout.  ``lambda_Q[pos, i] = (Q, lambda) - lambda_i`` and likewise
    ``alpha_Q``.
    """

    spec: VectorFieldSpec
    N: int
    M: int
    g: np.ndarray
    t: np.ndarray
    lambda_Q: np.ndarray
    alpha_Q: np.ndarray
    borel: "BorelTables | None" = None

    @property
    def basis(self) -> MonomialBasis:
        return MonomialBasis.get(self.spec.n, self.N)

    @property
    def k(self) -> int:
        return self.spec.k

    @property
    def beta_Q(self) -> np.ndarray:
        """``alpha_Q - k |Q|`` (the ramified shift used in the Borel plane)."""
        return self.alpha_Q - self.k * self.basis.degrees[:, None]

    def position(self, Q) -> int:
        return self.basis.position[tuple(Q)]

    def g_series(self, Q) -> np.ndarray:
        """``(n, M+1)`` coefficients of ``g_Q``."""
        return self.g[self.position(Q)]

    def g_table(self) -> dict:
        b = self.basis
        return {Q: self.g[pos] for pos, Q in enumerate(b.indices) if sum(Q) >= 1}

    def t_table(self) -> dict:
        b = self.basis
        return {Q: self.t[pos] for pos, Q in enumerate(b.indices) if sum(Q) >= 1}

    def w_table(self) -> dict:
        """``w_Q = z**(k|Q|) g_Q`` as ``(n, M + k|Q| + 1)`` arrays."""
        return {Q: _shift(v, self.k * sum(Q)) for Q, v in self.g_table().items()}

    def u_table(self) -> dict:
        """``u_Q = z**(k|Q|) t_Q``."""
        return {Q: _shift(v, self.k * sum(Q)) for Q, v in self.t_table().items()}

    def components(self, order: int | None = None) -> list:
        """``x_l = y_l + g_l(z, y)`` as series in ``y`` with z-series coefficients."""
        order = self.N if order is None else order
        size = self.basis.size_upto(order)
        ring = ZRing(self.M)
        return [MultiSeries(self.spec.n, order, self.g[:size, l, :], ring)
                for l in range(self.spec.n)]


def _shift(arr, s):
    pad = np.zeros(arr.shape[:-1] + (s,), dtype=complex)
    return np.concatenate([pad, arr], axis=-1)


def _divisor_tables(spec: VectorFieldSpec, basis: MonomialBasis):
    Qarr = np.array(basis.indices, dtype=float).reshape(len(basis), spec.n)
    lam = spec.lam_values
    alpha = spec.alpha_values
    lamQ = (Qarr @ lam)[:, None] - lam[None, :]
    alphaQ = (Qarr @ alpha)[:, None] - alpha[None, :]
    return lamQ, alphaQ


def _nonlinearity_terms(spec: VectorFieldSpec, M: int, max_degree: int):
    """``{j: (n, M+1) array}`` for the nonlinearity keys of degree <= max_degree."""
    out = {}
    for j, arr in spec.f.items():
        if sum(j) > max_degree:
            continue
        c = np.zeros((spec.n, M + 1), dtype=complex)
        L = min(arr.shape[1], M + 1)
        c[:, :L] = arr[:, :L]
        out[j] = c
    return out


def _substituted_nonlinearity(spec, comps, order, ring, coeff_map, use_abs=False):
    """``f_i(z, comps)`` for every component, sharing the monomial powers."""
    terms = {j: c for j, c in coeff_map.items() if sum(j) <= order}
    acc = np.zeros((spec.n, len(MonomialBasis.get(spec.n, order))) + ring.shape, dtype=complex)
    if not terms:
        return acc
    powers = ms_monomial_powers(comps, terms.keys(), order)
    for j, c in terms.items():
        p = powers[j].coeffs
        for i in range(spec.n):
            ci = np.abs(c[i]) if use_abs else c[i]
            if np.any(ci):
                acc[i] += ring.mul(np.broadcast_to(ci, p.shape), p)
    return acc


def assemble_tQ(g_table: dict, spec: VectorFieldSpec, Q, M: int) -> np.ndarray:
    """Coefficient ``t_Q(z)`` of ``y**Q`` in ``f(z, y + g(z, y))``.

    ``g_table`` must hold ``g_P`` (as ``(n, M+1)`` arrays) for every
    ``1 <= |P| < |Q|``; entries of higher degree are ignored, so ``t_Q``
    depends only on strictly lower shells.
    """
    Q = tuple(Q)
    m = sum(Q)
    n = spec.n
    if m <= 1:
        return np.zeros((n, M + 1), dtype=complex)
    basis = MonomialBasis.get(n, m)
    g = np.zeros((len(basis), n, M + 1), dtype=complex)
    for P in basis.indices:
        d = sum(P)
        if d == 0 or d >= m:
            continue
        if P not in g_table:
            raise StructuralError(f"g_{P} is needed for t_{Q} but missing")
        v = np.asarray(g_table[P], dtype=complex)
        L = min(v.shape[1], M + 1)
        g[basis.position[P], :, :L] = v[:, :L]
    ring = ZRing(M)
    comps = [MultiSeries(n, m, g[:, l, :], ring) for l in range(n)]
    t = _substituted_nonlinearity(spec, comps, m, ring, _nonlinearity_terms(spec, M, m))
    return t[:, basis.position[Q], :]


def formal_normalize(spec: VectorFieldSpec, N: int | None = None, M: int | None = None) -> NormalizationResult:
    """Fill ``g_Q`` for ``1 <= |Q| <= N`` to order ``z**M``, shell by shell.

    No hypothesis gating happens here: the formal solution exists exactly
    when no resonant divisor ``n + alpha_Q`` vanishes, and that case raises
    :class:`~gevreylab.errors.SolveError`.
    """
    N = spec.N if N is None else N
    M = spec.M if M is None else M
    if N < 1 or M < 0:
        raise PreconditionError("need N >= 1 and M >= 0")
    n, k = spec.n, spec.k
    eps = spec.tol("eps", DEFAULT_EPS)
    int_tol = spec.tol("h3_integrality", H3_INTEGRALITY_TOL)
    basis = MonomialBasis.get(n, N)
    lamQ, alphaQ = _divisor_tables(spec, basis)
    g = np.zeros((len(basis), n, M + 1), dtype=complex)
    t = np.zeros_like(g)
    for l in range(n):
        e = [0] * n
        e[l] = 1
        g[basis.position[tuple(e)], l, 0] = 1.0
    ring = ZRing(M)
    fterms = _nonlinearity_terms(spec, M, N)
    for m in range(2, N + 1):
        size = basis.size_upto(m)
        comps = [MultiSeries(n, m, g[:size, l, :], ring) for l in range(n)]
        tm = _substituted_nonlinearity(spec, comps, m, ring, fterms)
        sh = basis.shell(m)
        t[sh] = np.moveaxis(tm[:, sh, :], 0, 1)
        for pos in range(sh.start, sh.stop):
            Q = basis.indices[pos]
            for i in range(n):
                g[pos, i] = solve_gQ_ode(lamQ[pos, i], alphaQ[pos, i], t[pos, i], k, M,
                                         where=(i + 1, Q), eps=eps, int_tol=int_tol)
    return NormalizationResult(spec, N, M, g, t, lamQ, alphaQ)


# ---------------------------------------------------------------------------
# formal checks

def _abs_components(result: NormalizationResult, order: int):
    return [MultiSeries(c.dim, c.order, np.abs(c.coeffs).astype(complex), c.ring)
            for c in result.components(order)]


def conjugacy_residual(spec: VectorFieldSpec, result: NormalizationResult,
                       N: int | None = None, M: int | None = None) -> float:
    """Largest relative residual of the conjugacy equation over retained ``(Q, n)``.

    ``f(z, y + g)`` is recomputed in one substitution of the full table (not
    shell by shell) and every coefficient identity of the g_Q equation is
    checked against the magnitude of its own terms.
    """
    N = result.N if N is None else min(N, result.N)
    M = result.M if M is None else min(M, result.M)
    n, k = spec.n, spec.k
    ring = ZRing(M)
    comps = [c.with_ring(ring) for c in result.components(N)]
    fterms = _nonlinearity_terms(spec, M, N)
    T = _substituted_nonlinearity(spec, comps, N, ring, fterms)
    absT = _substituted_nonlinearity(spec, [c.with_ring(ring) for c in _abs_components(result, N)],
                                     N, ring, fterms, use_abs=True)
    basis = MonomialBasis.get(n, N)
    worst = 0.0
    for pos in range(basis.size_upto(1), len(basis)):
        for i in range(n):
            worst = max(worst, coefficient_ode_residual(
                result.lambda_Q[pos, i], result.alpha_Q[pos, i], T[i, pos],
                result.g[pos, i, :M + 1], k, scale_t=np.abs(absT[i, pos])))
    return worst


def check_monomial_preservation(result: NormalizationResult, r: Sequence[int] | None = None,
                                N: int | None = None) -> float:
    """Relative size of ``(y + g)**r - y**r`` over retained orders.

    Each coefficient is divided by the matching coefficient of
    ``(|y| + |g|)**r``, the magnitude of the products summed into it.
    """
    spec = result.spec
    r = tuple(spec.r if r is None else r)
    N = result.N if N is None else min(N, result.N)
    if not any(r):
        raise PreconditionError("r must be nonzero")
    comps = result.components(N)
    acomps = _abs_components(result, N)
    val = ms_monomial_powers(comps, [r], N)[r].coeffs.copy()
    mag = np.abs(ms_monomial_powers(acomps, [r], N)[r].coeffs)
    basis = MonomialBasis.get(spec.n, N)
    if r in basis.position:
        val[basis.position[r], 0] -= 1.0
    diff = np.abs(val)
    ok = mag > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(diff[ok] / mag[ok]))


# ---------------------------------------------------------------------------
# Borel plane

def ramify_sigma_k(series, k: int):
    """``(sigma_k phi)(z) = phi(z**(1/k))``: divide every exponent by ``k``.

    Accepts a :class:`ZSeries` or a coefficient array (last axis = powers of
    ``z``) and returns the same kind.
    """
    is_z = isinstance(series, ZSeries)
    c = series.coeffs if is_z else np.asarray(series, dtype=complex)
    if k < 1:
        raise ValueError("k must be a positive integer")
    idx = np.arange(c.shape[-1])
    bad = np.flatnonzero(np.any(np.abs(c.reshape(-1, c.shape[-1])) > 0, axis=0) & (idx % k != 0))
    if bad.size:
        raise PreconditionError(f"exponent {int(bad[0])} is not divisible by k={k}")
    out = c[..., ::k]
    return ZSeries(out) if is_z else out


def solve_borel_W(lambda_Q: complex, beta_Q: complex, U, k: int = 1, m: int = 1,
                  where=(None, None), eps: float = DEFAULT_EPS,
                  int_tol: float = H3_INTEGRALITY_TOL) -> np.ndarray:
    """Taylor solution of ``(k t + lambda_Q) W' + (k + beta_Q) W = U`` at ``t = 0``.

    For ``lambda_Q != 0`` the solution vanishing at 0 is unique; for
    ``lambda_Q = 0`` the origin is a regular singular point and each
    coefficient is a division by ``k (n + 1) + beta_Q``.  Coefficients below
    order ``m - 1`` are zero whenever ``U`` vanishes there.
    """
    U = np.asarray(U, dtype=complex).reshape(-1)
    T = U.size - 1
    w = np.zeros(T + 1, dtype=complex)
    if abs(lambda_Q) > eps:
        for n in range(T):
            w[n + 1] = (U[n] - (k * (n + 1) + beta_Q) * w[n]) / (lambda_Q * (n + 1))
        return w
    for n in range(T + 1):
        d = k * (n + 1) + beta_Q
        if abs(d) < int_tol:
            if n < m - 1 and U[n] == 0:
                continue
            i, Q = where
            raise SolveError(i, Q if Q is not None else (), n, "Borel-plane divisor vanishes")
        w[n] = U[n] / d
    return w


def derivative_shift(coeffs, m: int) -> np.ndarray:
    """Coefficients of the ``m``-th derivative of a truncated Taylor series."""
    c = np.asarray(coeffs, dtype=complex)
    T = c.shape[-1] - 1
    if m > T:
        return np.zeros(c.shape[:-1] + (0,), dtype=complex)
    n = np.arange(T - m + 1)
    fall = np.ones(T - m + 1)
    for j in range(1, m + 1):
        fall *= n + j
    return c[..., m:] * fall


@dataclass
class BorelTables:
    """Borel-plane tables in the ramified variable (plain ``t`` when ``k = 1``).

    ``W[pos, i, :]`` and ``U[pos, i, :]`` are Taylor coefficients up to
    ``t**T``; ``G[Q]`` holds ``d^m W_Q / dt^m`` to order ``T - |Q|``.
    """

    k: int
    T: int
    W: np.ndarray
    U: np.ndarray
    G: dict

    def G_series(self, Q, i: int) -> BorelSeries:
        """``G_Q`` in the order-k Borel plane (``G(t) = Gtilde(t**k)``)."""
        c = self.G[tuple(Q)][i]
        if self.k == 1:
            return BorelSeries(1, c)
        full = np.zeros((c.size - 1) * self.k + 1, dtype=complex)
        full[::self.k] = c
        return BorelSeries(self.k, full, self.k)


def _borel_of_poly(coeffs) -> np.ndarray:
    """Borel transform (order 1) of ``sum_{n>=1} c_n z**n``: ``c_n t**(n-1)/(n-1)!``."""
    c = np.asarray(coeffs, dtype=complex)
    if c.shape[-1] <= 1:
        return np.zeros(c.shape[:-1] + (1,), dtype=complex)
    out = c[..., 1:].copy()
    out /= np.array([factorial(n - 1) for n in range(1, c.shape[-1])], dtype=float)
    return out


def compute_borel_tables(result: NormalizationResult, T: int | None = None) -> BorelTables:
    """Run the Borel-plane recurrence for every ``1 <= |Q| <= N``.

    ``U_Q`` is assembled from lower ``W_P`` by convolution powers, splitting
    each ``f_j(z)`` into ``f_j(0)`` and its Borel transform; ``W_Q`` then
    solves the first order equation and ``G_Q`` is its ``|Q|``-th
    derivative.  Default ``T = M + N`` so that every ``G_Q`` reaches order
    ``M - 1`` or more.
    """
    spec = result.spec
    n, k, N = spec.n, spec.k, result.N
    T = result.M + N if T is None else T
    eps = spec.tol("eps", DEFAULT_EPS)
    int_tol = spec.tol("h3_integrality", H3_INTEGRALITY_TOL)
    basis = result.basis
    ring = BorelRing(T, 1)
    # ramified nonlinearity: constant parts and Borel images of the rest
    f0, fB = {}, {}
    for j, arr in spec.f.items():
        if sum(j) > N:
            continue
        red = ramify_sigma_k(arr, k)
        f0[j] = red[:, 0].copy()
        b = _borel_of_poly(red)
        fb = np.zeros((n, T + 1), dtype=complex)
        L = min(b.shape[1], T + 1)
        fb[:, :L] = b[:, :L]
        fB[j] = fb
    W = np.zeros((len(basis), n, T + 1), dtype=complex)
    U = np.zeros_like(W)
    for l in range(n):
        e = [0] * n
        e[l] = 1
        W[basis.position[tuple(e)], l, 0] = 1.0
    beta = result.beta_Q
    for m in range(2, N + 1):
        size = basis.size_upto(m)
        comps = [MultiSeries(n, m, W[:size, l, :], ring) for l in range(n)]
        keys = [j for j in f0 if sum(j) <= m]
        powers = ms_monomial_powers(comps, keys, m) if keys else {}
        sh = basis.shell(m)
        acc = np.zeros((sh.stop - sh.start, n, T + 1), dtype=complex)
        for j in keys:
            P = powers[j].coeffs[sh]
            for i in range(n):
                if f0[j][i] != 0:
                    acc[:, i] += f0[j][i] * P
                if np.any(fB[j][i]):
                    acc[:, i] += ring.mul(np.broadcast_to(fB[j][i], P.shape), P)
        U[sh] = acc
        for pos in range(sh.start, sh.stop):
            Q = basis.indices[pos]
            for i in range(n):
                W[pos, i] = solve_borel_W(result.lambda_Q[pos, i], beta[pos, i], U[pos, i], k, m,
                                          where=(i + 1, Q), eps=eps, int_tol=int_tol)
    G = {}
    for pos, Q in enumerate(basis.indices):
        m = sum(Q)
        if m >= 1:
            G[Q] = derivative_shift(W[pos], m)
    return BorelTables(k, T, W, U, G)


def borel_recurrence(result: NormalizationResult, Q, tables: BorelTables | None = None):
    """``(U_Q, W_Q, G_Q)`` coefficient arrays for one multi-index.

    Tables are computed (and cached on ``result``) on first use, since
    ``W_Q`` needs every lower shell anyway.
    """
    if tables is None:
        if result.borel is None:
            result.borel = compute_borel_tables(result)
        tables = result.borel
    pos = result.position(Q)
    return tables.U[pos], tables.W[pos], tables.G[tuple(Q)]


def route_equivalence(result: NormalizationResult, tables: BorelTables | None = None,
                      max_degree: int | None = None) -> float:
    """Largest relative mismatch between ``B_k(g_Q)`` and the t-plane ``G_Q``.

    The z-side route is the formal order-k Borel transform of
    ``g_Q - g_Q(0)``; the t-side route differentiates ``W_Q``.  The error in
    coefficient ``t**p`` is divided by the largest ``|t**p|`` coefficient of
    either route over the whole degree shell, so series that vanish exactly
    (and only carry round-off) are measured against their neighbours.
    """
    from .borel_laplace import borel_k_formal

    tables = tables or result.borel or compute_borel_tables(result)
    k = result.k
    max_degree = result.N if max_degree is None else max_degree
    pairs = {}
    for Q, G in tables.G.items():
        m = sum(Q)
        if m < 2 or m > max_degree:
            continue
        for i in range(result.spec.n):
            gq = result.g_series(Q)[i].copy()
            gq[0] = 0.0
            a = borel_k_formal(ZSeries(gq), k, allow_zero=True).coeffs
            b = tables.G_series(Q, i).coeffs
            L = min(a.size, b.size)
            pairs.setdefault(m, []).append((a[:L], b[:L]))
    worst = 0.0
    for m, items in pairs.items():
        L = min(a.size for a, _ in items)
        A = np.array([a[:L] for a, _ in items])
        B = np.array([b[:L] for _, b in items])
        scale = np.maximum(np.abs(A), np.abs(B)).max(axis=0)
        ok = scale > 0
        if np.any(ok):
            worst = max(worst, float((np.abs(A - B)[:, ok] / scale[ok]).max()))
    return worst


# ---------------------------------------------------------------------------
# bound verification

@dataclass
class BoundFit:
    """Smallest constants compatible with the sampled Borel-plane bounds."""

    K0_fit: float
    K_fit: float
    c0_used: float
    samples: dict
    mu_by_degree: dict = field(default_factory=dict)
    G_by_degree: dict = field(default_factory=dict)
    tail_ratio: float = 0.0


def choose_c0(p_max: float, c0: float = 0.5, n_boundary: int = 256, min_c0: float = 1e-6) -> float:
    """Halve ``c0`` until ``Re((1 + p t)/(1 + t)) > 0`` for ``|t| <= c0``, ``|p| <= p_max``.

    For fixed ``t`` the minimum over the disk ``|p| <= p_max`` is
    ``Re(1/(1+t)) - p_max |t/(1+t)|``, a harmonic-minus-subharmonic
    expression checked on the boundary circle and a few inner radii.
    """
    theta = np.linspace(0, 2 * np.pi, n_boundary, endpoint=False)
    while c0 > min_c0:
        ok = True
        for frac in (1.0, 0.75, 0.5, 0.25):
            t = frac * c0 * np.exp(1j * theta)
            val = (1.0 / (1.0 + t)).real - p_max * np.abs(t / (1.0 + t))
            if np.min(val) <= 0:
                ok = False
                break
        if ok:
            return c0
        c0 /= 2.0
    raise PreconditionError("no admissible c0 found")


def disk_max(coeffs, radius: float, n_radii: int = 8, n_angles: int = 32, include_zero=False):
    """Sampled maximum of ``|sum c_n t**n|`` over ``|t| <= radius``."""
    r = radius * np.arange(0 if include_zero else 1, n_radii + 1) / n_radii
    th = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    t = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    vals = np.polynomial.polynomial.polyval(t, np.asarray(coeffs, dtype=complex))
    return float(np.max(np.abs(vals)))


def verify_bounds(result: NormalizationResult, rho: Callable[[int], float] | None = None,
                  c: float | None = None, gamma: float | None = None, c0: float = 0.5,
                  n_radii: int = 8, n_angles: int = 32,
                  tables: BorelTables | None = None) -> BoundFit:
    """Fit ``K0`` and ``K`` from sampled Borel-plane tables.

    ``|W_Q(t)| <= K0**m |t|**(m-1)/(m-1)!`` is sampled on ``|t| <= c0 rho_m``
    (divided by ``k`` in the ramified plane) and ``|G_Q(t)| <= K**m`` on
    ``|t| <= rho_m / 2``.  ``rho`` maps a degree to the disk scale; pass
    ``(c, gamma)`` instead to use ``c m**-gamma``.  When every sampled
    quantity vanishes the sentinel 1 is returned.
    """
    tables = tables or result.borel or compute_borel_tables(result)
    k = result.k
    if rho is None:
        if c is None or gamma is None:
            raise PreconditionError("give either rho or (c, gamma)")
        rho = lambda m: c * m ** (-gamma)  # noqa: E731
    basis = result.basis
    p = np.abs(result.alpha_Q[basis.size_upto(0):] / basis.degrees[basis.size_upto(0):, None])
    c0u = choose_c0(float(p.max(initial=0.0)), c0)
    rr = np.arange(1, n_radii + 1) / n_radii
    th = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    unit = (rr[:, None] * np.exp(1j * th[None, :])).ravel()
    K0, K = 0.0, 0.0
    mu, gmax = {}, {}
    tail = 0.0
    for pos, Q in enumerate(basis.indices):
        m = sum(Q)
        if m == 0:
            continue
        radius_W = c0u * rho(m) / k
        radius_G = rho(m) / 2 if k == 1 else c0u * rho(m) / (2 * k)
        tW = radius_W * unit
        Rm = np.abs(tW) ** (m - 1) / factorial(m - 1)
        for i in range(result.spec.n):
            w = tables.W[pos, i]
            vals = np.abs(np.polynomial.polynomial.polyval(tW, w))
            if np.any(vals > 0):
                ratio = float(np.max(vals / Rm))
                K0 = max(K0, ratio ** (1.0 / m))
                mu[m] = max(mu.get(m, 0.0), ratio)
                last = np.abs(w[-4:]) * radius_W ** np.arange(w.size - 4, w.size)
                tail = max(tail, float(last.max() / vals.max()))
            if m >= 2:
                G = tables.G[Q][i]
                if np.any(G):
                    gm = disk_max(G, radius_G, n_radii, n_angles)
                    K = max(K, gm ** (1.0 / m))
                    gmax[m] = max(gmax.get(m, 0.0), gm)
    samples = {"n_radii": n_radii, "n_angles": n_angles, "c0": c0u,
               "W_radius": "c0*rho_m/k", "G_radius": "rho_m/2" if k == 1 else "c0*rho_m/(2k)"}
    return BoundFit(K0 if K0 > 0 else 1.0, K if K > 0 else 1.0, c0u, samples, mu, gmax, tail)
