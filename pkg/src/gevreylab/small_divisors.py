"""Small-divisor floors of a linear part and its diophantine type.

All quantities are minima of ``|(Q, lambda) - lambda_i|`` over growing
families of multi-indices, computed by brute force one degree shell at a
time.  Divisors below ``eps`` count as resonances and are skipped, with the
same threshold used by :mod:`gevreylab.resonance`.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb, inf
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .resonance import DEFAULT_EPS, LinearPart
from .series_core import compositions

__all__ = [
    "ENUMERATION_BUDGET", "SmallDivisorProfile", "RhoSequence", "DiophantineFit",
    "shell_minima", "omega_sequence", "bruno_sum", "rho_sequence",
    "fit_diophantine_type", "small_divisor_profile", "thread_count",
]

ENUMERATION_BUDGET = 10 ** 8
RECORD_RTOL = 1e-9


def thread_count() -> int:
    """Worker cap from ``GEVREYLAB_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("GEVREYLAB_THREADS", "1")))
    except ValueError:
        return 1


def _shell_min(lam: np.ndarray, m: int, eps: float) -> float:
    Q = compositions(m, lam.size)
    div = np.abs((Q @ lam)[:, None] - lam[None, :])
    div = div[div > eps]
    return float(div.min()) if div.size else inf


def shell_minima(lp: LinearPart, max_degree: int, eps: float = DEFAULT_EPS,
                 budget: int = ENUMERATION_BUDGET):
    """Nonzero divisor minimum for each degree ``m = 0..max_degree``.

    Returns ``(minima, complete)``; ``complete`` is False when the budget of
    enumerated multi-indices ran out, in which case later shells are
    ``inf``.  Shells are evaluated concurrently when ``GEVREYLAB_THREADS``
    allows it; the reduction is a min, so the result does not depend on the
    schedule.
    """
    lam = lp.values
    n = lam.size
    counts = [comb(m + n - 1, n - 1) for m in range(max_degree + 1)]
    last, used = max_degree, 0
    for m, c in enumerate(counts):
        used += c
        if used > budget:
            last = m - 1
            break
    degrees = list(range(last + 1))
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            vals = list(pool.map(lambda m: _shell_min(lam, m, eps), degrees))
    else:
        vals = [_shell_min(lam, m, eps) for m in degrees]
    out = np.full(max_degree + 1, inf)
    out[:last + 1] = vals
    return out, last == max_degree


def omega_sequence(lp: LinearPart, K: int, eps: float = DEFAULT_EPS,
                   budget: int = ENUMERATION_BUDGET):
    """Bruno floors ``omega_1..omega_K``.

    ``omega_k`` is the least nonzero ``|(Q, lambda) - lambda_i|`` over
    ``2 <= |Q| <= 2**k``.  Returns ``(omega, complete)``.
    """
    if K < 1:
        raise PreconditionError("K must be at least 1")
    shells, complete = shell_minima(lp, 2 ** K, eps, budget)
    cum = np.minimum.accumulate(np.concatenate([[inf, inf], shells[2:]]))
    omega = np.array([cum[2 ** k] for k in range(1, K + 1)])
    return omega, complete


def bruno_sum(omega: Sequence[float]) -> np.ndarray:
    """Partial sums ``S_K = -sum_{k<K} ln(omega_{k+1}) / 2**k``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0) or not np.all(np.isfinite(omega)):
        raise PreconditionError("omega entries must be positive and finite")
    terms = -np.log(omega) / 2.0 ** np.arange(omega.size)
    return np.cumsum(terms)


@dataclass
class RhoSequence:
    """``values[i]`` is ``rho_m`` for ``m = m[i]``."""

    m: np.ndarray
    values: np.ndarray
    min_degree: int
    complete: bool = True

    def at(self, m: int) -> float:
        return float(self.values[m - self.m[0]])

    def __len__(self):
        return self.values.size


def rho_sequence(lp: LinearPart, m_max: int, eps: float = DEFAULT_EPS,
                 min_degree: int = 1, budget: int = ENUMERATION_BUDGET) -> RhoSequence:
    """Floors ``rho_m = min{|(P, lambda) - lambda_j| != 0 : min_degree <= |P| <= m}``.

    The default ``min_degree = 1`` ranges over all nonzero ``P``; with
    ``min_degree = 2`` only degrees carrying genuine nonlinear divisors
    enter and the sequence starts at ``m = 2``.
    """
    if m_max < 1:
        raise PreconditionError("m_max must be at least 1")
    if min_degree not in (1, 2):
        raise ValueError("min_degree must be 1 or 2")
    if m_max < min_degree:
        raise PreconditionError(f"m_max must be at least {min_degree}")
    shells, complete = shell_minima(lp, m_max, eps, budget)
    shells[:min_degree] = inf
    cum = np.minimum.accumulate(shells)
    ms = np.arange(min_degree, m_max + 1)
    return RhoSequence(ms, cum[min_degree:], min_degree, complete)


@dataclass
class DiophantineFit:
    c: float
    gamma: float
    residual: float
    records: np.ndarray
    window: tuple
    flag: str = ""


def fit_diophantine_type(rho, window: tuple | None = None, m=None) -> DiophantineFit:
    """Fit ``ln rho_m ~ ln c - gamma ln m`` on the strict decay records.

    ``rho`` is a :class:`RhoSequence` or an array with ``rho[i] = rho_{i+1}``
    (pass ``m`` explicitly otherwise).  ``window = (m_lo, m_hi)`` is
    inclusive.  Fewer than three records give ``gamma = 0`` and
    ``c = min rho`` with ``flag = "insufficient decay data"``.
    """
    if isinstance(rho, RhoSequence):
        ms, vals = rho.m, rho.values
    else:
        vals = np.asarray(rho, dtype=float)
        ms = np.arange(1, vals.size + 1) if m is None else np.asarray(m)
    if window is not None:
        lo, hi = window
        sel = (ms >= lo) & (ms <= hi)
        ms, vals = ms[sel], vals[sel]
    if vals.size == 0:
        raise PreconditionError("empty fit window")
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise PreconditionError("rho entries must be positive and finite")
    keep = np.ones(vals.size, dtype=bool)
    # equal minima reached along different lattice paths differ by round-off
    keep[1:] = vals[1:] < vals[:-1] * (1.0 - RECORD_RTOL)
    rec_m, rec_v = ms[keep], vals[keep]
    win = (int(ms[0]), int(ms[-1]))
    if rec_m.size < 3:
        return DiophantineFit(float(vals.min()), 0.0, 0.0, rec_m, win, "insufficient decay data")
    X = np.column_stack([np.ones(rec_m.size), -np.log(rec_m)])
    coef, *_ = np.linalg.lstsq(X, np.log(rec_v), rcond=None)
    lnc, gamma = coef
    resid = np.log(rec_v) - X @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    if gamma < 0:
        return DiophantineFit(float(vals.min()), 0.0, rms, rec_m, win, "negative slope clamped")
    return DiophantineFit(float(np.exp(lnc)), float(gamma), rms, rec_m, win)


@dataclass
class SmallDivisorProfile:
    omega: np.ndarray
    bruno_partial_sums: np.ndarray
    rho: RhoSequence
    fit: DiophantineFit
    K: int
    m_max: int
    eps: float
    complete: bool = True
    notes: list = field(default_factory=list)

    @property
    def fit_c(self):
        return self.fit.c

    @property
    def fit_gamma(self):
        return self.fit.gamma

    @property
    def fit_residual(self):
        return self.fit.residual


def small_divisor_profile(lp: LinearPart, m_max: int, K: int, eps: float = DEFAULT_EPS,
                          min_degree: int = 1, window=None) -> SmallDivisorProfile:
    """Everything at once: omega, Bruno partial sums, rho and the (c, gamma) fit."""
    omega, c1 = omega_sequence(lp, K, eps)
    notes = []
    finite = omega[np.isfinite(omega)]
    bruno = bruno_sum(finite) if finite.size else np.array([])
    if finite.size < omega.size:
        notes.append("omega undefined (no nonzero divisor) for the first scan levels")
    rho = rho_sequence(lp, m_max, eps, min_degree)
    finite_rho = np.isfinite(rho.values)
    if not finite_rho.all():
        notes.append("rho undefined for the lowest degrees; fit skips them")
        rho_fit = RhoSequence(rho.m[finite_rho], rho.values[finite_rho], rho.min_degree, rho.complete)
    else:
        rho_fit = rho
    fit = fit_diophantine_type(rho_fit, window)
    return SmallDivisorProfile(omega, bruno, rho, fit, K, m_max, eps,
                               c1 and rho.complete, notes)
