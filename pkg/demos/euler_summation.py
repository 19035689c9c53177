# coding: utf-8

# # Summing the Euler series
#
# The equation z^2 g' + g = z has the divergent formal solution
# g(z) = sum (-1)^(n-1) (n-1)! z^n.  Its Borel transform is 1/(1+t), so the
# Borel-Laplace sum along d = 0 is e^(1/z) E_1(1/z).

import math

import numpy as np
from scipy.special import exp1

from gevreylab import borel_k_formal, borel_sum, gevrey_fit, pade_continue, solve_gQ_ode
from gevreylab.series_core import ZSeries

# The coefficients come straight from the coefficient recurrence.

g = solve_gQ_ode(1, 0, [1], 1, 20)
print("g_1..g_8:", g[1:9].real)

# Formal Borel transform and its Pade continuation.  The single pole at
# t = -1 sits on the negative axis, so every direction except d = pi works.

b = borel_k_formal(ZSeries(g), 1)
pade = pade_continue(b)
print("Pade degrees:", pade.L, pade.M, " poles:", np.round(pade.poles, 12))

# Laplace transform against the exponential-integral oracle.

for z in (0.05, 0.1, 0.2):
    val = borel_sum(ZSeries(g), 1, 0.0, z)
    print(f"z={z:<5} sum={val.real:.12f}  e^(1/z)E1(1/z)={math.exp(1 / z) * exp1(1 / z):.12f}")

# The coefficients grow like Gamma(1+n), so the fitted Gevrey order is 1.

fit = gevrey_fit(np.abs(g[1:]), N=np.arange(1, 21))
print(f"Gevrey fit: s={fit.s_hat:.3f}  A={fit.A_hat:.3f}")
