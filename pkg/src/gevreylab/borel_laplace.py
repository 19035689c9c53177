"""Borel transform, Padé continuation, Laplace quadrature and Gevrey fits.

The k-sum of a formal series ``f`` in a direction ``d`` is evaluated as
``L_k(pade(B_k f))``: the formal Borel transform of order ``k`` is a
convergent series near ``t = 0``, a Padé approximant continues it along the
ray ``arg t = d``, and the Laplace integral of order ``k`` is computed by
adaptive quadrature plus an analytic tail bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma as gamma_fn, lgamma
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize, special

from .errors import FitDomainError, PreconditionError, SummationDirectionError
from .series_core import BorelSeries, MonomialBasis, ZSeries

__all__ = [
    "SectorSpec", "GevreyFit", "NormalizationGevreyFit", "PadeApproximant", "PowerSumEnvelope",
    "borel_k_formal", "pade_continue", "blocking_poles", "direction_usable",
    "laplace_k_numeric", "borel_sum", "gevrey_fit", "normalization_norms",
    "gevrey_order_of_normalization", "asymptotic_residual_scan", "power_sum", "power_sum_envelope",
]

DEFAULT_CLEARANCE = 0.1
DEFAULT_QUAD_TOL = 1e-11
PADE_RANK_TOL = 1e-13


@dataclass(frozen=True)
class SectorSpec:
    """Open sector ``|arg z - direction| < half_opening``, ``0 < |z| < radius``."""

    direction: float
    half_opening: float
    radius: float

    def __post_init__(self):
        if not 0 < self.half_opening < np.pi:
            raise ValueError("half_opening must lie in (0, pi)")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def contains(self, z) -> bool:
        z = complex(z)
        if z == 0 or abs(z) >= self.radius:
            return False
        dev = np.angle(z * np.exp(-1j * self.direction))
        return abs(dev) < self.half_opening

    def sample(self, n_radii: int = 5, n_angles: int = 5, shrink: float = 0.9) -> np.ndarray:
        r = self.radius * np.arange(1, n_radii + 1) / (n_radii + 1)
        a = self.direction + shrink * self.half_opening * np.linspace(-1, 1, n_angles)
        return (r[:, None] * np.exp(1j * a[None, :])).ravel()


# ---------------------------------------------------------------------------
# formal Borel transform

def borel_k_formal(f: ZSeries, k: int, allow_zero: bool = False) -> BorelSeries:
    """Formal Borel transform of order ``k``: ``f_n z**n -> f_n t**(n-k) / Gamma(n/k)``.

    Parameters
    ----------
    f : ZSeries
        Series with valuation at least ``k``.
    allow_zero : bool
        Accept the zero series (returned as the zero Borel series).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    c = f.coeffs
    M = f.trunc_order
    if not np.any(c):
        if allow_zero:
            return BorelSeries(k, np.zeros(max(M - k + 1, 1), dtype=complex), max(k, M + 1))
        raise PreconditionError("zero series has no Borel transform to report")
    v = f.valuation
    if v < k:
        raise PreconditionError(f"valuation {v} is below k={k}; split off the low-order terms first")
    n = np.arange(k, M + 1)
    denom = np.array([gamma_fn(x) for x in n / k])
    return BorelSeries(k, c[k:] / denom, v)


# ---------------------------------------------------------------------------
# Padé continuation

@dataclass
class PadeApproximant:
    """``p(t)/q(t)`` with ``q(0) = 1``; ``poles`` are the roots of ``q``."""

    numerator: np.ndarray
    denominator: np.ndarray
    L: int
    M: int
    poles: np.ndarray
    diagnostics: list = field(default_factory=list)

    def __call__(self, t):
        P = np.polynomial.polynomial.polyval(t, self.numerator)
        Q = np.polynomial.polynomial.polyval(t, self.denominator)
        return P / Q


def pade_continue(b, L: int | None = None, Mdeg: int | None = None,
                  rank_tol: float = PADE_RANK_TOL) -> PadeApproximant:
    """``[L/Mdeg]`` Padé approximant of a Borel-plane series.

    The denominator solves the Toeplitz system on coefficients
    ``L+1..L+Mdeg``.  When that system is numerically rank deficient the
    denominator degree is lowered (with a note in ``diagnostics``); a series
    whose coefficients beyond ``L`` vanish is returned as its own numerator.
    """
    c = np.asarray(b.coeffs if isinstance(b, BorelSeries) else b, dtype=complex)
    T = c.size - 1
    if Mdeg is None:
        Mdeg = T // 2
    if L is None:
        L = T - Mdeg
    if L < 0 or Mdeg < 0 or L + Mdeg > T:
        raise PreconditionError(f"[{L}/{Mdeg}] needs {L + Mdeg + 1} coefficients, have {T + 1}")
    notes = []
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if Mdeg > 0 and np.all(np.abs(c[L + 1:L + Mdeg + 1]) <= rank_tol * scale):
        notes.append(f"coefficients beyond degree {L} vanish; denominator degree {Mdeg} -> 0")
        Mdeg = 0
    q = np.ones(1, dtype=complex)
    while Mdeg > 0:
        A = np.array([[c[i - j] if i - j >= 0 else 0.0 for j in range(1, Mdeg + 1)]
                      for i in range(L + 1, L + Mdeg + 1)], dtype=complex)
        rhs = -c[L + 1:L + Mdeg + 1]
        sv = np.linalg.svd(A, compute_uv=False)
        if sv[0] == 0 or sv[-1] <= rank_tol * sv[0]:
            notes.append(f"singular Padé system at denominator degree {Mdeg}; lowered to {Mdeg - 1}")
            Mdeg -= 1
            continue
        q = np.concatenate([[1.0], np.linalg.solve(A, rhs)])
        break
    p = np.array([sum(q[j] * c[i - j] for j in range(min(i, Mdeg) + 1)) for i in range(L + 1)],
                 dtype=complex)
    qs = np.trim_zeros(q, "b")
    poles = np.roots(qs[::-1]) if qs.size > 1 else np.zeros(0, dtype=complex)
    return PadeApproximant(p, q, L, Mdeg, poles, notes)


def _ray_distance(p: complex, d: float) -> float:
    w = p * np.exp(-1j * d)
    return abs(p) if w.real <= 0 else abs(w.imag)


def blocking_poles(cont: PadeApproximant, d: float, clearance: float = DEFAULT_CLEARANCE) -> list:
    """Poles closer to the ray ``arg t = d`` than ``clearance * |pole|``."""
    return [complex(p) for p in cont.poles
            if abs(p) == 0 or _ray_distance(p, d) < clearance * abs(p)]


def direction_usable(cont: PadeApproximant, d: float, clearance: float = DEFAULT_CLEARANCE) -> bool:
    return not blocking_poles(cont, d, clearance)


# ---------------------------------------------------------------------------
# Laplace transform

def _as_callable(cont) -> Callable:
    if isinstance(cont, BorelSeries):
        return lambda t: np.polynomial.polynomial.polyval(t, cont.coeffs)
    if callable(cont):
        return cont
    raise TypeError("continuation must be a PadeApproximant, BorelSeries or callable")


def _growth_degree(cont) -> int:
    if isinstance(cont, PadeApproximant):
        return max(cont.numerator.size - 1 - (np.trim_zeros(cont.denominator, "b").size - 1), 0)
    if isinstance(cont, BorelSeries):
        nz = np.flatnonzero(cont.coeffs)
        return int(nz[-1]) if nz.size else 0
    return 0


def laplace_k_numeric(cont, k: int, d: float, z: complex, clearance: float = DEFAULT_CLEARANCE,
                      tol: float = DEFAULT_QUAD_TOL, full_output: bool = False):
    """``int_0^{inf e^{id}} F(t) exp(-(t/z)**k) d(t**k)`` by quadrature along the ray.

    The integral over ``[0, T]`` is computed with adaptive Gauss-Kronrod
    (real and imaginary parts separately); ``T`` grows until the analytic
    tail bound ``sup|F|/(1+r)**D * int_T^inf (2r)**D e^{-a r**k} d(r**k)``
    drops below a tenth of ``tol``.  Returns the value, or ``(value,
    error)`` with ``full_output``.

    Raises
    ------
    SummationDirectionError
        The ray is blocked by a Padé pole, or ``Re((e^{id}/z)**k) <= 0``.
    """
    z = complex(z)
    if z == 0:
        raise PreconditionError("z must be nonzero")
    a = ((np.exp(1j * d) / z) ** k).real
    if a <= 0:
        raise SummationDirectionError("z outside summation sector")
    if isinstance(cont, PadeApproximant):
        bad = blocking_poles(cont, d, clearance)
        if bad:
            p = min(bad, key=abs)
            raise SummationDirectionError(
                f"Padé pole at {p.real:.6g}{p.imag:+.6g}j blocks direction d={d:.6g}", pole=p)
    F = _as_callable(cont)
    e = np.exp(1j * d)
    ek = np.exp(1j * k * d)

    def integrand(r):
        t = r * e
        return F(t) * np.exp(-(t / z) ** k) * k * r ** (k - 1) * ek

    D = _growth_degree(cont)
    s = (D + k) / k
    T = (max(30.0, 2.0 * s) / a) ** (1.0 / k)
    tail = np.inf
    probe = None
    for _ in range(60):
        probe = T * np.linspace(1.0, 8.0, 64)
        G = float(np.max(np.abs(F(probe * e)) / (1.0 + probe) ** D))
        tail = G * 2.0 ** D * a ** (-s) * gamma_fn(s) * special.gammaincc(s, a * T ** k) * k / k
        if tail < 0.1 * tol:
            break
        T *= 1.25
    scale = min(T, 40.0 * abs(z))
    pts = [p for p in (scale * 0.1, scale, 5 * scale) if p < T]
    opts = dict(limit=400, epsabs=tol * 0.1, epsrel=tol, points=pts or None)
    re, e1 = integrate.quad(lambda r: integrand(r).real, 0.0, T, **opts)
    im, e2 = integrate.quad(lambda r: integrand(r).imag, 0.0, T, **opts)
    val = complex(re, im)
    if full_output:
        return val, float(abs(e1) + abs(e2) + tail)
    return val


def borel_sum(f: ZSeries, k: int, d: float, z: complex, L: int | None = None,
              Mdeg: int | None = None, clearance: float = DEFAULT_CLEARANCE,
              tol: float = DEFAULT_QUAD_TOL, full_output: bool = False,
              polynomial: bool = False):
    """k-sum of ``f`` in direction ``d`` evaluated at ``z``.

    Terms of degree below ``k`` are kept as a polynomial; the rest goes
    through Borel transform, Padé continuation and Laplace quadrature.
    ``polynomial=True`` declares the coefficients to be the whole series, so
    the Borel image is used as is (denominator degree 0).
    """
    c = f.coeffs
    z = complex(z)
    head = complex(np.polynomial.polynomial.polyval(z, c[:k])) if c.size else 0j
    rest = c.copy()
    rest[:k] = 0
    if not np.any(rest):
        a = ((np.exp(1j * d) / z) ** k).real if z != 0 else 0.0
        if a <= 0:
            raise SummationDirectionError("z outside summation sector")
        return (head, 0.0) if full_output else head
    b = borel_k_formal(ZSeries(rest), k)
    if polynomial:
        L, Mdeg = b.trunc_order, 0
    cont = pade_continue(b, L, Mdeg)
    val, err = laplace_k_numeric(cont, k, d, z, clearance, tol, full_output=True)
    return (head + val, err) if full_output else head + val


# ---------------------------------------------------------------------------
# Gevrey fits

@dataclass
class GevreyFit:
    """Fit of ``|f_N| ~ C A**N Gamma(1 + N s)`` on ``window`` (inclusive)."""

    s_hat: float
    A_hat: float
    C_hat: float
    residual: float
    window: tuple
    n_points: int
    flag: str = ""


def _fit_given_s(N, y, s):
    X = np.column_stack([np.ones(N.size), N])
    rhs = y - np.array([lgamma(1.0 + n * s) for n in N])
    coef, *_ = np.linalg.lstsq(X, rhs, rcond=None)
    r = rhs - X @ coef
    return coef, float(np.sqrt(np.mean(r ** 2)))


def gevrey_fit(norms: Sequence[float], window: tuple | None = None, N: Sequence[int] | None = None,
               s_max: float = 5.0, drop: int = 3) -> GevreyFit:
    """Least-squares Gevrey envelope of a coefficient sequence.

    ``norms[i]`` is ``|f_N|`` at ``N = N[i]`` (default ``N = i``).  The
    default window drops the first ``drop`` entries.  The exponent is
    located on a coarse grid over ``[0, s_max]`` and refined by bounded
    Brent minimisation of the RMS log residual; ``(ln C, ln A)`` come from a
    linear solve at each trial ``s``.  Zero norms are skipped; fewer than 5
    usable points are flagged as low confidence.
    """
    y_all = np.asarray(norms, dtype=float)
    N_all = np.arange(y_all.size) if N is None else np.asarray(N)
    if window is None:
        window = (int(N_all[min(drop, N_all.size - 1)]) if N_all.size else 0,
                  int(N_all[-1]) if N_all.size else 0)
    lo, hi = window
    sel = (N_all >= lo) & (N_all <= hi) & (y_all > 0) & np.isfinite(y_all)
    Nw, yw = N_all[sel].astype(float), np.log(y_all[sel])
    if Nw.size == 0:
        return GevreyFit(0.0, 1.0, 0.0, 0.0, window, 0, "all norms vanish on window")
    flag = ""
    if Nw.size < 5:
        flag = "low confidence: fewer than 5 usable points"
    elif Nw.size < 8:
        flag = "short window: fewer than 8 usable points"
    if Nw.size < 2:
        return GevreyFit(0.0, 1.0, float(np.exp(yw[0])), 0.0, window, int(Nw.size), flag)
    yc = yw - yw.mean()
    grid = np.linspace(0.0, s_max, 201)
    obj = lambda s: _fit_given_s(Nw, yc, s)[1]  # noqa: E731
    vals = np.array([obj(s) for s in grid])
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(obj, bounds=(a, b), method="bounded",
                                   options={"xatol": 1e-12})
    s = float(res.x) if res.fun <= vals[i] else float(grid[i])
    s = max(s, 0.0)
    (lnC, lnA), rms = _fit_given_s(Nw, yc, s)
    return GevreyFit(s, float(np.exp(lnA)), float(np.exp(lnC + yw.mean())), rms, window,
                     int(Nw.size), flag)


@dataclass
class NormalizationGevreyFit(GevreyFit):
    """Gevrey fit of the normalizing series plus the predicted bound."""

    R: float = 1.0
    norms: np.ndarray = None
    gamma: float = 0.0
    k: int = 1
    predicted: float = 1.0
    gamma_source: str = ""


def normalization_norms(result, R: float):
    """``h_N`` and per-shell contributions ``S[m, N]`` of the normalizing series.

    ``S[m, N] = max_i sum_{|Q|=m} |g_{i,Q,N}| R**m`` and
    ``h_N = max_i sum_{1<=|Q|<=N_x} |g_{i,Q,N}| R**|Q|``.
    """
    basis: MonomialBasis = result.basis
    n = result.spec.n
    deg = basis.degrees
    w = np.abs(result.g) * (float(R) ** deg)[:, None, None]
    Nx = result.N
    S = np.zeros((Nx + 1, result.M + 1))
    per_i = np.zeros((n, result.M + 1))
    for m in range(1, Nx + 1):
        sh = basis.shell(m)
        block = w[sh].sum(axis=0)
        per_i += block
        S[m] = block.max(axis=0)
    return per_i.max(axis=0), S


def gevrey_order_of_normalization(result, R: float = 0.5, window: tuple | None = None,
                                  gamma: float | None = None, profile_m_max: int = 200,
                                  divergence_tol: float = 1e-12,
                                  min_degree: int = 1) -> NormalizationGevreyFit:
    """Fit the z-Gevrey order of ``g`` on the polydisk of radius ``R``.

    ``gamma`` defaults to the fitted diophantine type of the linear part
    (brute force to ``profile_m_max``), so the predicted order
    ``(1 + gamma)/k`` is itself empirical.

    Raises
    ------
    FitDomainError
        If the top degree shell does not decay relative to the one below
        for most retained ``N``: the sum over ``Q`` is not converging at
        this ``R`` ("reduce R").
    """
    from .small_divisors import small_divisor_profile

    if R <= 0:
        raise PreconditionError("R must be positive")
    h, S = normalization_norms(result, R)
    Nx = result.N
    if Nx >= 3:
        top, prev = S[Nx], S[Nx - 1]
        live = (top > 0) | (prev > 0)
        live[0] = False
        if np.any(live):
            growing = top[live] >= prev[live] * (1 + divergence_tol)
            if np.count_nonzero(growing) > growing.size / 2:
                raise FitDomainError(
                    f"reduce R: shell sums do not decay in |Q| at R={R:g}")
    k = result.k
    source = "given"
    if gamma is None:
        prof = small_divisor_profile(result.spec.linear_part, profile_m_max, 1,
                                     result.spec.tol("eps", 1e-10), min_degree)
        gamma = prof.fit_gamma
        source = f"fitted from rho_m, m <= {profile_m_max}"
    hz = h.copy()
    hz[0] = 0.0
    fit = gevrey_fit(hz, window)
    return NormalizationGevreyFit(fit.s_hat, fit.A_hat, fit.C_hat, fit.residual, fit.window,
                                  fit.n_points, fit.flag, float(R), h, float(gamma), k,
                                  (1.0 + gamma) / k, source)


# ---------------------------------------------------------------------------
# remainder scans

def asymptotic_residual_scan(g: Callable, coeffs, zs, N_max: int | None = None) -> np.ndarray:
    """Table ``[N, z] -> |g(z) - sum_{n<N} c_n z**n| / |z|**N``.

    ``g`` evaluates the sectorial function (for instance through
    :func:`borel_sum`), ``coeffs`` are its formal coefficients and ``zs``
    the sample points.  Row ``N`` runs from 1 to ``N_max``.
    """
    c = np.asarray(coeffs, dtype=complex)
    zs = np.asarray(zs, dtype=complex).reshape(-1)
    N_max = c.size if N_max is None else min(N_max, c.size)
    gv = np.array([g(z) for z in zs], dtype=complex)
    out = np.zeros((N_max, zs.size))
    for N in range(1, N_max + 1):
        jet = np.polynomial.polynomial.polyval(zs, c[:N])
        out[N - 1] = np.abs(gv - jet) / np.abs(zs) ** N
    return out


# ---------------------------------------------------------------------------
# power-sum envelope

def power_sum(mu: float, x: float, m_max: int = 200) -> float:
    """``sum_{m=1}^{m_max} m**mu x**m`` (summed in logs to avoid overflow)."""
    m = np.arange(1, m_max + 1, dtype=float)
    logs = mu * np.log(m) + m * np.log(x)
    top = logs.max()
    return float(np.exp(top) * np.sum(np.exp(logs - top)))


@dataclass
class PowerSumEnvelope:
    """Constants with ``S(mu) <= C3 * C4**mu * Gamma(mu)`` on the sampled ``mu``."""

    C3: float
    C4: float
    mus: np.ndarray
    sums: np.ndarray
    margin: np.ndarray

    @property
    def holds(self) -> bool:
        return bool(np.all(self.margin >= 0))


def power_sum_envelope(delta: float, mus: Sequence[float] = range(1, 21),
                       m_max: int = 200) -> PowerSumEnvelope:
    """Fit ``(C3, C4)`` for ``sum_{m<=m_max} m**mu (1-delta)**m``.

    ``ln C4`` is the least-squares slope of ``ln S(mu) - ln Gamma(mu)``
    against ``mu``; ``ln C3`` is then the largest residual, so the bound
    holds on every sampled ``mu`` with a single pair of constants.  For the
    full series ``C4 = 1/(-ln(1-delta))`` is the natural scale.
    """
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)")
    mus = np.asarray(list(mus), dtype=float)
    x = 1.0 - delta
    S = np.array([power_sum(mu, x, m_max) for mu in mus])
    y = np.log(S) - special.gammaln(mus)
    slope, _ = np.polyfit(mus, y, 1)
    lnC3 = float(np.max(y - slope * mus))
    C3, C4 = float(np.exp(lnC3)), float(np.exp(slope))
    margin = (lnC3 + slope * mus + special.gammaln(mus)) - np.log(S)
    return PowerSumEnvelope(C3, C4, mus, S, margin)
