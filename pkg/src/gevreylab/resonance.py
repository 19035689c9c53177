"""Resonances of a diagonal linear part and the hypotheses on system data.

The linear part is ``s = sum lambda_i x_i d/dx_i``.  A resonance is a pair
``(i, Q)`` with ``|Q| >= 2`` and ``(Q, lambda) = lambda_i``.  Everything here
is certified only up to a finite scan degree, which every report carries.

Eigenvalues given as ``int`` or :class:`fractions.Fraction` switch detection
to exact integer arithmetic; anything else is compared in floating point
against a tolerance ``eps``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, inf
from numbers import Rational
from typing import Mapping, Sequence

import numpy as np

from .series_core import MultiSeries, ZRing, compositions, multi_indices

__all__ = [
    "DEFAULT_EPS", "H3_INTEGRALITY_TOL", "COEFF_TOL",
    "LinearPart", "Resonance", "ResonanceReport", "VectorFieldSpec",
    "HypothesisReport", "M0Result",
    "detect_resonances", "null_vectors", "find_resonance_monomial",
    "resonance_report", "check_well_prepared", "check_hypotheses",
    "compute_m0_delta0",
]

DEFAULT_EPS = 1e-10
H3_INTEGRALITY_TOL = 1e-8
COEFF_TOL = 1e-10


@dataclass(frozen=True)
class LinearPart:
    """Eigenvalues ``lambda_1..lambda_n`` of the diagonal linear part."""

    lam: tuple

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(self.lam))
        if len(self.lam) < 2:
            raise ValueError("the linear part needs n >= 2 eigenvalues")

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Rational) for v in self.lam)

    @property
    def values(self) -> np.ndarray:
        return np.array([complex(v) for v in self.lam], dtype=complex)

    def integer_scaled(self):
        """``(L, ints)`` with ``lambda = ints / L``; exact mode only."""
        fr = [Fraction(v) for v in self.lam]
        L = 1
        for v in fr:
            L = L * v.denominator // gcd(L, v.denominator)
        return L, np.array([int(v * L) for v in fr], dtype=np.int64)


@dataclass(frozen=True)
class Resonance:
    i: int          # 1-based component index
    Q: tuple
    defect: float

    @property
    def degree(self) -> int:
        return sum(self.Q)


@dataclass
class ResonanceReport:
    resonances: list
    r: tuple | None
    is_one_resonant: bool
    scan_degree: int
    eps: float
    null_vectors: list = field(default_factory=list)
    p: int = 0
    beta: complex | None = None
    ichikawa: bool | None = None
    diagnostics: list = field(default_factory=list)


# ---------------------------------------------------------------------------

def _shell_divisors(lp: LinearPart, m: int):
    """``Q`` rows of degree ``m`` and the matrix ``(Q, lambda) - lambda_i``.

    In exact mode the matrix holds integers scaled by the common
    denominator; otherwise complex numbers.
    """
    Q = compositions(m, lp.n)
    if lp.exact:
        _, ints = lp.integer_scaled()
        return Q, (Q @ ints)[:, None] - ints[None, :]
    lam = lp.values
    return Q, (Q @ lam)[:, None] - lam[None, :]


def detect_resonances(lp: LinearPart, max_degree: int, eps: float = DEFAULT_EPS) -> list:
    """All resonances ``(i, Q)`` with ``2 <= |Q| <= max_degree``.

    Output is ordered by degree, then by the graded monomial order, then by
    ``i``.
    """
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    if eps <= 0:
        raise ValueError("eps must be positive")
    out = []
    for m in range(2, max_degree + 1):
        Q, div = _shell_divisors(lp, m)
        mags = np.abs(div)
        hit = (mags == 0) if lp.exact else (mags < eps)
        for row, col in zip(*np.nonzero(hit)):
            out.append(Resonance(int(col) + 1, tuple(int(v) for v in Q[row]),
                                 float(mags[row, col]) if not lp.exact else 0.0))
    return out


def null_vectors(lp: LinearPart, max_degree: int, eps: float = DEFAULT_EPS) -> list:
    """Nonzero ``r`` with ``|r| <= max_degree`` and ``(r, lambda) = 0``."""
    out = []
    for m in range(1, max_degree + 1):
        Q = compositions(m, lp.n)
        if lp.exact:
            _, ints = lp.integer_scaled()
            hit = (Q @ ints) == 0
        else:
            hit = np.abs(Q @ lp.values) < eps
        out.extend(tuple(int(v) for v in row) for row in Q[hit])
    return out


def _primitive(r):
    g = 0
    for v in r:
        g = gcd(g, v)
    return tuple(v // g for v in r)


def _factors_through(res: Resonance, r) -> bool:
    """Whether ``Q - e_i = l * r`` for some integer ``l >= 0``."""
    P = list(res.Q)
    P[res.i - 1] -= 1
    if min(P) < 0:
        return False
    if not any(P):
        return True
    ratios = set()
    for pv, rv in zip(P, r):
        if rv == 0:
            if pv != 0:
                return False
        else:
            if pv % rv:
                return False
            ratios.add(pv // rv)
    return len(ratios) == 1


def find_resonance_monomial(lp: LinearPart, max_degree: int, eps: float = DEFAULT_EPS):
    """Primitive resonance monomial ``r`` or ``None``, with the 1-resonance flag.

    Returns ``(r, is_one_resonant)``.  ``r`` is reported whenever every null
    vector found is a multiple of a single primitive one; 1-resonance
    additionally requires every resonance to factor as ``l*r + e_i``.
    """
    rep = resonance_report(lp, max_degree, eps)
    return rep.r, rep.is_one_resonant


def resonance_report(lp: LinearPart, max_degree: int, eps: float = DEFAULT_EPS,
                     alpha: Sequence | None = None) -> ResonanceReport:
    res = detect_resonances(lp, max_degree, eps)
    nulls = null_vectors(lp, max_degree, eps)
    prims = sorted({_primitive(v) for v in nulls},
                   key=lambda v: (sum(v), tuple(-x for x in v)))
    diags = []
    r = None
    one = False
    if not prims:
        diags.append("no monomial first integral found in scan range")
    elif len(prims) > 1:
        diags.append(f"non-proportional null multi-indices {prims[:2]}")
    else:
        r = prims[0]
        bad = [x for x in res if not _factors_through(x, r)]
        if bad:
            diags.append(f"resonance (i={bad[0].i}, Q={bad[0].Q}) is not of the form l*r+e_i")
        one = not bad
    rep = ResonanceReport(res, r, one, max_degree, eps, nulls, diagnostics=diags)
    if r is not None:
        rep.p = sum(1 for v in r if v)
        if alpha is not None:
            beta = sum(rv * complex(a) for rv, a in zip(r, alpha))
            rep.beta = beta
            rep.ichikawa = abs(beta) > eps
    return rep


# ---------------------------------------------------------------------------

@dataclass
class VectorFieldSpec:
    """Data of ``z**(k+1) dx/dz = (Lambda + z**k A) x + z**k f(z, x)``.

    ``f`` maps a multi-index ``j`` (``|j| >= 2``) to an ``(n, L)`` complex
    array; row ``i`` holds the z-polynomial coefficients of ``f_{i,j}(z)``.
    ``N`` and ``M`` are the default truncation degrees in ``x`` and ``z``.
    """

    n: int
    k: int
    lam: tuple
    alpha: tuple
    r: tuple
    f: dict = field(default_factory=dict)
    N: int = 8
    M: int = 12
    tolerances: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.lam = tuple(self.lam)
        self.alpha = tuple(complex(a) for a in self.alpha)
        self.r = tuple(int(v) for v in self.r)
        if self.n < 2 or self.k < 1:
            raise ValueError("need n >= 2 and k >= 1")
        if not (len(self.lam) == len(self.alpha) == len(self.r) == self.n):
            raise ValueError("lambda, alpha and r must all have length n")
        if any(v < 0 for v in self.r):
            raise ValueError("r must have nonnegative entries")
        clean = {}
        for j, arr in self.f.items():
            j = tuple(int(v) for v in j)
            if len(j) != self.n or sum(j) < 2 or min(j) < 0:
                raise ValueError(f"nonlinearity key {j} must be a multi-index of degree >= 2")
            arr = np.atleast_2d(np.asarray(arr, dtype=complex))
            if arr.shape[0] != self.n:
                raise ValueError(f"f_{j} must have n={self.n} components")
            clean[j] = arr
        self.f = clean

    @property
    def linear_part(self) -> LinearPart:
        return LinearPart(self.lam)

    @property
    def lam_values(self) -> np.ndarray:
        return self.linear_part.values

    @property
    def alpha_values(self) -> np.ndarray:
        return np.array(self.alpha, dtype=complex)

    @property
    def beta(self) -> complex:
        return complex(sum(rv * a for rv, a in zip(self.r, self.alpha)))

    def tol(self, name, default):
        return float(self.tolerances.get(name, default))

    def f_component(self, i: int, N: int, M: int) -> MultiSeries:
        """Component ``f_i`` (0-based) as a series in ``x`` with z-series coefficients."""
        ring = ZRing(M)
        return MultiSeries.from_terms(self.n, N, {j: arr[i] for j, arr in self.f.items()}, ring)

    def f_degree(self) -> int:
        return max((sum(j) for j in self.f), default=0)

    def permuted(self, perm: Sequence[int]) -> "VectorFieldSpec":
        """Relabel coordinates: new coordinate ``a`` is old coordinate ``perm[a]``."""
        perm = list(perm)
        newf = {}
        for j, arr in self.f.items():
            newf[tuple(j[p] for p in perm)] = arr[perm]
        return VectorFieldSpec(self.n, self.k, [self.lam[p] for p in perm],
                               [self.alpha[p] for p in perm], [self.r[p] for p in perm],
                               newf, self.N, self.M, dict(self.tolerances), self.name)


def _divisible_by_own_coordinate(spec: VectorFieldSpec, i: int, tol: float):
    """Monomials ``j`` of ``f_i`` lacking a factor ``x_i`` (0-based ``i``)."""
    return [j for j, arr in spec.f.items() if j[i] == 0 and np.max(np.abs(arr[i])) > tol]


def _weighted_tilde_sum(spec: VectorFieldSpec, tol: float):
    """Coefficients of ``sum_{r_i != 0} r_i f_i / x_i`` above ``tol``."""
    acc: dict = {}
    for i, ri in enumerate(spec.r):
        if not ri:
            continue
        for j, arr in spec.f.items():
            if j[i] == 0:
                continue
            jt = list(j)
            jt[i] -= 1
            jt = tuple(jt)
            row = arr[i]
            cur = acc.get(jt)
            if cur is None:
                acc[jt] = ri * row
            else:
                size = max(cur.size, row.size)
                acc[jt] = np.pad(cur, (0, size - cur.size)) + ri * np.pad(row, (0, size - row.size))
    return {j: v for j, v in acc.items() if np.max(np.abs(v)) > tol}


def check_well_prepared(spec: VectorFieldSpec):
    """Check the well-prepared shape of the nonlinearity.

    Returns ``(ok, diagnostics)``: ``f_i = x_i * ftilde_i`` whenever
    ``r_i != 0``, ``sum r_i ftilde_i = 0`` coefficientwise and
    ``beta = sum r_i alpha_i != 0``.
    """
    tol = spec.tol("coeff", COEFF_TOL)
    diags = []
    if not any(spec.r):
        diags.append("r is zero")
    for i, ri in enumerate(spec.r):
        if ri and _divisible_by_own_coordinate(spec, i, tol):
            diags.append(f"f_{i + 1} not divisible by x_{i + 1}")
    leftover = _weighted_tilde_sum(spec, tol)
    if leftover:
        j = sorted(leftover, key=lambda v: (sum(v), tuple(-x for x in v)))[0]
        diags.append(f"sum r_i ftilde_i != 0 (first nonzero monomial {j})")
    if abs(spec.beta) <= spec.tol("eps", DEFAULT_EPS):
        diags.append("beta = sum r_i alpha_i vanishes")
    return not diags, diags


# ---------------------------------------------------------------------------

@dataclass
class M0Result:
    m0: int | None
    delta0: float
    found: bool
    diagnostics: list = field(default_factory=list)


def compute_m0_delta0(lp: LinearPart, alpha: Sequence, scan_degree: int,
                      eps: float = DEFAULT_EPS) -> M0Result:
    """Smallest ``m0`` with ``Re((alpha, Q) - alpha_l) >= delta0 > 0`` on the scanned tail.

    Only resonant ``(l, Q)`` with ``m0 <= |Q| <= scan_degree`` are seen; a
    candidate needs at least one resonance in its tail.  With no resonances
    at all the sentinel ``(2, inf)`` is returned.
    """
    alpha = np.array([complex(a) for a in alpha])
    res = detect_resonances(lp, scan_degree, eps)
    if not res:
        return M0Result(2, inf, True, ["no resonances in scan range"])
    deg = np.array([x.degree for x in res])
    val = np.array([(np.dot(x.Q, alpha) - alpha[x.i - 1]).real for x in res])
    for m0 in range(2, scan_degree + 1):
        tail = val[deg >= m0]
        if tail.size and tail.min() > 0:
            return M0Result(m0, float(tail.min()), True)
    worst = int(np.argmin(val))
    return M0Result(None, float(val.min()), False,
                    [f"Re((alpha,Q)-alpha_l) = {val[worst]:.6g} <= 0 at "
                     f"(l={res[worst].i}, Q={res[worst].Q}) with no positive tail in range"])


@dataclass
class HypothesisReport:
    H1: bool
    H2: bool
    H3: bool
    H4: bool
    H5: bool
    Hp1: bool
    Hp2: bool
    Hp3: bool
    ichikawa: bool
    scan_degree: int
    i0: int | None = None
    delta1: float | None = None
    m0: int | None = None
    delta0: float | None = None
    offending: dict = field(default_factory=dict)

    def flags(self) -> dict:
        return {name: getattr(self, name) for name in
                ("H1", "H2", "H3", "H4", "H5", "Hp1", "Hp2", "Hp3", "ichikawa")}

    @property
    def normalizable(self) -> bool:
        """Hypotheses needed by the formal normalization (H1-H4)."""
        return self.H1 and self.H2 and self.H3 and self.H4


def _i0_search(lam, alpha, real_idx, eps, scale=1.0):
    """Best ``i0`` for the H2-type inequality and its minimum."""
    best_i0, best = None, -inf
    for i0 in real_idx:
        if abs(lam[i0]) <= eps:
            continue
        others = [i for i in real_idx if i != i0]
        vals = [((alpha[i] - lam[i].real / lam[i0].real * alpha[i0]) / scale).real for i in others]
        m = min(vals) if vals else inf
        if m > best:
            best_i0, best = i0, m
    return best_i0, best


def check_hypotheses(spec: VectorFieldSpec, scan_degree: int) -> HypothesisReport:
    """Evaluate H1-H5, H'1-H'3 and Ichikawa's condition by direct checks."""
    if scan_degree < 2:
        raise ValueError("scan_degree must be at least 2")
    eps = spec.tol("eps", DEFAULT_EPS)
    int_tol = spec.tol("h3_integrality", H3_INTEGRALITY_TOL)
    ctol = spec.tol("coeff", COEFF_TOL)
    lam = spec.lam_values
    alpha = spec.alpha_values
    n = spec.n
    off: dict = {}

    real_idx = [i for i in range(n) if abs(lam[i].imag) <= eps]
    nonneg_im = all(lam[i].imag >= -eps for i in range(n))
    not_all_zero = any(abs(v) > eps for v in lam)

    H1 = nonneg_im and not_all_zero
    if not H1:
        off["H1"] = [i + 1 for i in range(n) if lam[i].imag < -eps] or ["all eigenvalues zero"]

    i0, delta1 = None, None
    if not real_idx:
        H2 = True
    elif all(abs(lam[i]) <= eps for i in real_idx):
        H2 = all(alpha[i].real > 0 for i in real_idx)
        delta1 = min(alpha[i].real for i in real_idx)
        if not H2:
            off["H2"] = [i + 1 for i in real_idx if alpha[i].real <= 0]
    else:
        i0, delta1 = _i0_search(lam, alpha, real_idx, eps)
        H2 = delta1 > 0
        if not H2:
            off["H2"] = [i0 + 1 if i0 is not None else None]

    bad3 = []
    for res in detect_resonances(spec.linear_part, scan_degree, eps):
        v = alpha[res.i - 1] - np.dot(res.Q, alpha)
        nearest = round(v.real)
        if abs(v.imag) < int_tol and abs(v.real - nearest) < int_tol and nearest >= 0:
            bad3.append((res.i, res.Q))
    H3 = not bad3
    if bad3:
        off["H3"] = bad3

    nonreal = [i for i in range(n) if abs(lam[i].imag) > eps]
    bad4 = [i + 1 for i in nonreal if _divisible_by_own_coordinate(spec, i, ctol)]
    H4 = not bad4
    if bad4:
        off["H4"] = bad4

    bad5 = [i + 1 for i, ri in enumerate(spec.r) if ri and _divisible_by_own_coordinate(spec, i, ctol)]
    leftover = _weighted_tilde_sum(spec, ctol)
    H5 = any(spec.r) and not bad5 and not leftover
    if not H5:
        off["H5"] = bad5 + sorted(leftover)[:3]

    has_zero = any(abs(v) <= eps for v in lam)
    Hp1 = nonneg_im and (has_zero or len(real_idx) >= 2)
    beta = spec.beta
    ichikawa = abs(beta) > eps
    if ichikawa:
        _, dp = _i0_search(lam, alpha, real_idx, eps, scale=beta)
        Hp2 = dp > 0
    else:
        Hp2 = False
    Hp3 = H4

    m0 = compute_m0_delta0(spec.linear_part, alpha, scan_degree, eps)
    H1, H2, H3, H4, H5, Hp1, Hp2, Hp3, ichikawa = (bool(v) for v in (H1, H2, H3, H4, H5, Hp1, Hp2, Hp3, ichikawa))
    return HypothesisReport(H1, H2, H3, H4, H5, Hp1, Hp2, Hp3, ichikawa, scan_degree,
                            i0=None if i0 is None else i0 + 1,
                            delta1=None if delta1 is None else float(delta1),
                            m0=m0.m0, delta0=m0.delta0, offending=off)
