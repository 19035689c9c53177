# coding: utf-8

# # Formal normalization of a 2d 1-resonant system
#
# The bundled euler2d spec has lambda = (1, -1), resonance monomial x1 x2
# and beta = 1.  This walks it through the whole pipeline.

from gevreylab import (check_hypotheses, check_monomial_preservation, compute_borel_tables,
                       conjugacy_residual, corpus_path, formal_normalize,
                       gevrey_order_of_normalization, load_spec, resonance_report,
                       route_equivalence, rho_sequence, verify_bounds)

spec = load_spec(corpus_path("euler2d"))
rep = resonance_report(spec.linear_part, 8, alpha=spec.alpha_values)
print("1-resonant:", rep.is_one_resonant, " r =", rep.r, " beta =", rep.beta)
print("hypotheses:", check_hypotheses(spec, 8))

# Coefficient tables g_{i,Q,n} up to |Q| = 8 and z^12.

res = formal_normalize(spec, 8, 12)
print("g_{1,(2,0)}:", res.g_series((2, 0))[0].real)
print("conjugacy residual:", conjugacy_residual(spec, res))
print("monomial preservation residual:", check_monomial_preservation(res))

# The Borel-plane route agrees with the formal Borel transform of g.

tables = compute_borel_tables(res)
print("route equivalence:", route_equivalence(res, tables))
bf = verify_bounds(res, rho=rho_sequence(spec.linear_part, 8).at, tables=tables)
print(f"K0 = {bf.K0_fit:.3g}   K = {bf.K_fit:.3g}")

# Growth of the normalizing series: Gevrey order close to (1 + gamma)/k = 1.

fit = gevrey_order_of_normalization(res, 0.5)
print(f"s_hat = {fit.s_hat:.3f}  predicted = {fit.predicted:.3f}  {fit.flag}")
