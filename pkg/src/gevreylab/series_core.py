"""Truncated power series in several variables, in z, and in the Borel plane.

Multivariate series are stored densely: one row per multi-index, rows in
graded order (degree ascending, lexicographically descending inside a
degree, so ``x1**2`` precedes ``x1*x2`` precedes ``x2**2``).  Because the
order is graded, truncating to a lower total degree is a prefix slice.

Each row holds a coefficient drawn from a *ring*: a plain complex number
(:data:`SCALAR`), a truncated series in ``z`` (:class:`ZRing`) or a
truncated series in the Borel variable ``t`` multiplied by convolution
(:class:`BorelRing`).  The product of two multivariate series is computed
for all index pairs at once with a cached pair table, which keeps the
normalization recurrences cheap.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, lgamma, exp
from typing import Mapping, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError

__all__ = [
    "compositions", "multi_indices", "monomial_count", "MonomialBasis",
    "ScalarRing", "ZRing", "BorelRing", "SCALAR",
    "MultiSeries", "ms_add", "ms_mul", "ms_substitute", "ms_monomial_powers",
    "ZSeries", "zs_add", "zs_mul",
    "BorelSeries", "conv", "beta_weight",
]


# ---------------------------------------------------------------------------
# multi-indices

@lru_cache(maxsize=None)
def _compositions(m: int, n: int) -> np.ndarray:
    if n == 1:
        return np.array([[m]], dtype=np.int64)
    blocks = []
    for first in range(m, -1, -1):
        rest = _compositions(m - first, n - 1)
        head = np.full((rest.shape[0], 1), first, dtype=np.int64)
        blocks.append(np.hstack([head, rest]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def compositions(m: int, n: int) -> np.ndarray:
    """All ``Q`` in ``N^n`` with ``|Q| = m``, lexicographically descending.

    Returns a read-only integer array of shape ``(C(m+n-1, n-1), n)``.
    """
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    return _compositions(m, n)


def monomial_count(n: int, m: int) -> int:
    """Number of multi-indices of ``N^n`` with total degree exactly ``m``."""
    return comb(n + m - 1, m)


def multi_indices(n: int, max_degree: int, min_degree: int = 0) -> list[tuple[int, ...]]:
    """Multi-indices with ``min_degree <= |Q| <= max_degree`` in graded order."""
    out = []
    for m in range(min_degree, max_degree + 1):
        out.extend(tuple(int(v) for v in row) for row in compositions(m, n))
    return out


class MonomialBasis:
    """Graded enumeration of the monomials of ``N^n`` up to degree ``order``.

    Instances are cached, so ``MonomialBasis.get(n, N)`` is cheap to call
    repeatedly.
    """

    def __init__(self, dim: int, order: int):
        self.dim = dim
        self.order = order
        self.indices = multi_indices(dim, order)
        self.position = {Q: pos for pos, Q in enumerate(self.indices)}
        self.degrees = np.array([sum(Q) for Q in self.indices], dtype=np.int64)
        # offsets[m] = first row of degree m; offsets[order + 1] = size
        self.offsets = np.concatenate(
            [[0], np.cumsum([monomial_count(dim, m) for m in range(order + 1)])]
        ).astype(np.int64)
        self._pairs = None

    @classmethod
    @lru_cache(maxsize=None)
    def get(cls, dim: int, order: int) -> "MonomialBasis":
        return cls(dim, order)

    def __len__(self):
        return len(self.indices)

    def size_upto(self, degree: int) -> int:
        return int(self.offsets[min(degree, self.order) + 1])

    def shell(self, m: int) -> slice:
        return slice(int(self.offsets[m]), int(self.offsets[m + 1]))

    def pairs(self):
        """Index triples ``(i, j, k)`` with ``Q_i + Q_j = Q_k`` inside the basis."""
        if self._pairs is None:
            arr = np.array(self.indices, dtype=np.int64).reshape(len(self), self.dim)
            I, J, K = [], [], []
            for i, Qi in enumerate(arr):
                di = self.degrees[i]
                stop = self.size_upto(self.order - di)
                for j in range(stop):
                    I.append(i)
                    J.append(j)
                    K.append(self.position[tuple(int(v) for v in Qi + arr[j])])
            self._pairs = tuple(np.array(v, dtype=np.int64) for v in (I, J, K))
        return self._pairs


# ---------------------------------------------------------------------------
# coefficient rings

@dataclass(frozen=True)
class ScalarRing:
    """Complex numbers."""

    shape: tuple = ()
    has_one = True

    def mul(self, a, b):
        return a * b

    def one(self):
        return np.ones(self.shape, dtype=complex)

    def meet(self, other):
        if other != self:
            raise DimensionError(f"incompatible coefficient rings {self} and {other}")
        return self

    def cast(self, arr, target):
        return arr


SCALAR = ScalarRing()


@dataclass(frozen=True)
class ZRing:
    """Series in ``z`` truncated after ``z**M`` under the Cauchy product."""

    M: int
    has_one = True

    @property
    def shape(self):
        return (self.M + 1,)

    def mul(self, a, b):
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape, dtype=complex)
        size = self.M + 1
        for s in range(size):
            bs = b[..., s:s + 1]
            if not np.any(bs):
                continue
            out[..., s:] += a[..., :size - s] * bs
        return out

    def one(self):
        e = np.zeros(self.shape, dtype=complex)
        e[0] = 1.0
        return e

    def meet(self, other):
        if not isinstance(other, ZRing):
            raise DimensionError(f"incompatible coefficient rings {self} and {other}")
        return ZRing(min(self.M, other.M))

    def cast(self, arr, target):
        return arr[..., :target.M + 1]


@lru_cache(maxsize=None)
def _beta_table(size: int, k: int) -> np.ndarray:
    w = np.empty((size, size))
    for p in range(size):
        for q in range(size):
            w[p, q] = beta_weight(p, q, k)
    w.setflags(write=False)
    return w


def beta_weight(p: int, q: int, k: int = 1) -> float:
    """Weight of ``t**p * t**q`` in the order-``k`` Borel convolution.

    ``t**p * t**q = B((p+k)/k, (q+k)/k) t**(p+q+k)``.  For ``k = 1`` this is
    ``p! q! / (p+q+1)!``, evaluated exactly in rationals before rounding.
    """
    if k == 1:
        return float(Fraction(factorial(p) * factorial(q), factorial(p + q + 1)))
    a, b = (p + k) / k, (q + k) / k
    return exp(lgamma(a) + lgamma(b) - lgamma(a + b))


@dataclass(frozen=True)
class BorelRing:
    """Series in ``t`` truncated after ``t**T`` under Borel convolution.

    The ring has no unit (the unit of convolution is a Dirac mass), so
    substitution into a series with a constant term is refused.
    """

    T: int
    k: int = 1
    has_one = False

    @property
    def shape(self):
        return (self.T + 1,)

    def mul(self, a, b):
        a, b = np.broadcast_arrays(a, b)
        out = np.zeros(a.shape, dtype=complex)
        size = self.T + 1
        k = self.k
        w = _beta_table(size, k)
        for q in range(size - k):
            bq = b[..., q:q + 1]
            if not np.any(bq):
                continue
            span = size - q - k
            out[..., q + k:] += a[..., :span] * bq * w[:span, q]
        return out

    def one(self):
        raise PreconditionError("Borel convolution has no unit element")

    def meet(self, other):
        if not isinstance(other, BorelRing) or other.k != self.k:
            raise DimensionError(f"incompatible coefficient rings {self} and {other}")
        return BorelRing(min(self.T, other.T), self.k)

    def cast(self, arr, target):
        return arr[..., :target.T + 1]


# ---------------------------------------------------------------------------
# multivariate series

@dataclass(frozen=True, eq=False)
class MultiSeries:
    """Truncated power series in ``dim`` variables.

    ``coeffs[pos]`` is the coefficient of ``x**basis.indices[pos]``; every
    index of total degree ``<= order`` has a row, absent terms are zero.
    """

    dim: int
    order: int
    coeffs: np.ndarray
    ring: object = field(default=SCALAR)

    def __post_init__(self):
        expected = (len(self.basis),) + tuple(self.ring.shape)
        if self.coeffs.shape != expected:
            raise DimensionError(f"coefficient array has shape {self.coeffs.shape}, expected {expected}")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("series coefficients must be finite")

    @property
    def basis(self) -> MonomialBasis:
        return MonomialBasis.get(self.dim, self.order)

    # constructors
    @classmethod
    def zeros(cls, dim, order, ring=SCALAR):
        size = len(MonomialBasis.get(dim, order))
        return cls(dim, order, np.zeros((size,) + tuple(ring.shape), dtype=complex), ring)

    @classmethod
    def from_terms(cls, dim, order, terms: Mapping, ring=SCALAR):
        """Build from ``{Q: coefficient}``; terms above ``order`` are dropped."""
        out = np.zeros((len(MonomialBasis.get(dim, order)),) + tuple(ring.shape), dtype=complex)
        pos = MonomialBasis.get(dim, order).position
        for Q, c in terms.items():
            Q = tuple(int(v) for v in Q)
            if len(Q) != dim:
                raise DimensionError(f"multi-index {Q} has length {len(Q)}, expected {dim}")
            if sum(Q) > order:
                continue
            c = np.asarray(c, dtype=complex)
            if ring.shape:
                c = _fit_length(c, ring.shape[0])
            out[pos[Q]] += c
        return cls(dim, order, out, ring)

    @classmethod
    def variable(cls, dim, order, i, ring=SCALAR):
        """The coordinate function ``x_i`` (0-based ``i``)."""
        e = [0] * dim
        e[i] = 1
        return cls.from_terms(dim, order, {tuple(e): ring.one()}, ring)

    # access
    def coefficient(self, Q):
        pos = self.basis.position.get(tuple(Q))
        if pos is None:
            return np.zeros(self.ring.shape, dtype=complex)
        return self.coeffs[pos]

    def terms(self, tol=0.0) -> dict:
        """Nonzero coefficients as ``{Q: coefficient}``."""
        out = {}
        for Q, c in zip(self.basis.indices, self.coeffs):
            if np.max(np.abs(c), initial=0.0) > tol:
                out[Q] = c
        return out

    def truncate(self, order):
        order = min(order, self.order)
        size = self.basis.size_upto(order)
        return MultiSeries(self.dim, order, self.coeffs[:size], self.ring)

    def with_ring(self, ring):
        """Restrict coefficients to a coarser truncation of the same ring."""
        return MultiSeries(self.dim, self.order, self.ring.cast(self.coeffs, ring), ring)

    def __add__(self, other):
        return ms_add(self, other)

    def __sub__(self, other):
        return ms_add(self, -other)

    def __neg__(self):
        return MultiSeries(self.dim, self.order, -self.coeffs, self.ring)

    def __mul__(self, other):
        if isinstance(other, MultiSeries):
            return ms_mul(self, other)
        return MultiSeries(self.dim, self.order, self.coeffs * other, self.ring)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs), initial=0.0))


def _fit_length(c, size):
    c = np.atleast_1d(c)
    if c.shape[-1] >= size:
        return c[..., :size]
    pad = np.zeros(c.shape[:-1] + (size - c.shape[-1],), dtype=complex)
    return np.concatenate([c, pad], axis=-1)


def _align(a: MultiSeries, b: MultiSeries):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    ring = a.ring.meet(b.ring)
    order = min(a.order, b.order)
    a = a.truncate(order).with_ring(ring)
    b = b.truncate(order).with_ring(ring)
    return a, b, order, ring


def ms_add(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    """Coefficientwise sum truncated to the smaller order."""
    a, b, order, ring = _align(a, b)
    return MultiSeries(a.dim, order, a.coeffs + b.coeffs, ring)


def ms_mul(a: MultiSeries, b: MultiSeries) -> MultiSeries:
    """Cauchy product truncated to the smaller order."""
    a, b, order, ring = _align(a, b)
    basis = a.basis
    I, J, K = basis.pairs()
    # skip pairs with an identically zero factor
    nz_a = np.any(a.coeffs.reshape(len(basis), -1) != 0, axis=1)
    nz_b = np.any(b.coeffs.reshape(len(basis), -1) != 0, axis=1)
    keep = nz_a[I] & nz_b[J]
    I, J, K = I[keep], J[keep], K[keep]
    out = np.zeros_like(a.coeffs)
    if I.size:
        prod = ring.mul(a.coeffs[I], b.coeffs[J])
        np.add.at(out, K, prod)
    return MultiSeries(a.dim, order, out, ring)


def ms_monomial_powers(subs: Sequence[MultiSeries], exponents, order: int) -> dict:
    """Products ``prod_l subs[l]**j[l]`` for every ``j`` in ``exponents``.

    Intermediate powers are memoised, so a family of exponents sharing
    prefixes costs one multiplication per distinct multi-index.
    """
    subs = [s.truncate(order) for s in subs]
    dim, ring = subs[0].dim, subs[0].ring
    memo: dict = {}

    def power(j):
        if j in memo:
            return memo[j]
        if not any(j):
            if not ring.has_one:
                raise PreconditionError("substitution needs a constant term but the ring has no unit")
            val = MultiSeries.from_terms(dim, order, {(0,) * dim: ring.one()}, ring)
        else:
            l = max(i for i, v in enumerate(j) if v)
            lower = list(j)
            lower[l] -= 1
            lower = tuple(lower)
            val = subs[l] if not any(lower) else ms_mul(power(lower), subs[l])
        memo[j] = val
        return val

    return {tuple(j): power(tuple(j)) for j in exponents}


def ms_substitute(f: MultiSeries, subs: Sequence[MultiSeries]) -> MultiSeries:
    """Compose ``f(subs[0], ..., subs[n-1])`` truncated at ``f.order``.

    Every substituted series must have zero constant term.  Substituted
    series may be scalar while ``f`` has z-series coefficients; they are
    promoted to constants in ``z``.
    """
    if len(subs) != f.dim:
        raise DimensionError(f"f has {f.dim} variables but {len(subs)} substitutions were given")
    dim_y = subs[0].dim
    ring = f.ring
    prepared = []
    for l, s in enumerate(subs):
        if s.dim != dim_y:
            raise DimensionError("substituted series must share one dimension")
        if np.any(s.coeffs[0] != 0):
            raise PreconditionError(f"substitution for x_{l + 1} has a nonzero constant term")
        if s.ring != ring:
            s = _promote(s, ring)
        prepared.append(s)
    order = min(f.order, min(s.order for s in prepared))
    terms = f.terms()
    out = MultiSeries.zeros(dim_y, order, ring)
    if not terms:
        return out
    powers = ms_monomial_powers(prepared, terms.keys(), order)
    acc = np.zeros_like(out.coeffs)
    for j, c in terms.items():
        p = powers[j]
        acc += ring.mul(np.broadcast_to(c, p.coeffs.shape), p.coeffs)
    return MultiSeries(dim_y, order, acc, ring)


def _promote(s: MultiSeries, ring) -> MultiSeries:
    if s.ring == SCALAR and isinstance(ring, ZRing):
        c = np.zeros(s.coeffs.shape + ring.shape, dtype=complex)
        c[..., 0] = s.coeffs
        return MultiSeries(s.dim, s.order, c, ring)
    return s.with_ring(s.ring.meet(ring))


# ---------------------------------------------------------------------------
# univariate series

@dataclass(frozen=True, eq=False)
class ZSeries:
    """Series ``sum_{n<=M} coeffs[n] z**n``."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex).reshape(-1))
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("series coefficients must be finite")

    @property
    def trunc_order(self) -> int:
        return self.coeffs.size - 1

    @property
    def valuation(self) -> int:
        """Index of the first nonzero coefficient (``M + 1`` for zero)."""
        nz = np.flatnonzero(self.coeffs)
        return int(nz[0]) if nz.size else self.trunc_order + 1

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def __mul__(self, other):
        return zs_mul(self, other)

    def __add__(self, other):
        return zs_add(self, other)


def zs_add(a: ZSeries, b: ZSeries) -> ZSeries:
    M = min(a.trunc_order, b.trunc_order)
    return ZSeries(a.coeffs[:M + 1] + b.coeffs[:M + 1])


def zs_mul(a: ZSeries, b: ZSeries) -> ZSeries:
    """Cauchy product truncated to the smaller order."""
    M = min(a.trunc_order, b.trunc_order)
    return ZSeries(np.convolve(a.coeffs[:M + 1], b.coeffs[:M + 1])[:M + 1])


@dataclass(frozen=True, eq=False)
class BorelSeries:
    """Truncated series ``sum_p coeffs[p] t**p`` in the order-``k`` Borel plane.

    ``source_valuation`` is the valuation of the z-series it was obtained
    from; it must be at least ``k`` so that no negative power of ``t`` is
    ever stored.
    """

    k: int
    coeffs: np.ndarray
    source_valuation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex).reshape(-1))
        if self.k < 1:
            raise ValueError("Borel order k must be a positive integer")
        if self.source_valuation < self.k:
            raise PreconditionError(
                f"source valuation {self.source_valuation} is below k={self.k}")

    @property
    def trunc_order(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)


def conv(a: BorelSeries, b: BorelSeries) -> BorelSeries:
    """Borel-plane convolution, ``t**p * t**q = B(p+1, q+1) t**(p+q+1)`` for k = 1."""
    if a.k != b.k:
        raise DimensionError(f"Borel order mismatch: {a.k} vs {b.k}")
    T = min(a.trunc_order, b.trunc_order)
    ring = BorelRing(T, a.k)
    c = ring.mul(a.coeffs[:T + 1], b.coeffs[:T + 1])
    return BorelSeries(a.k, c, a.source_valuation + b.source_valuation)
