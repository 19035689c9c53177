# coding: utf-8

# # Small divisors of a 1-resonant linear part
#
# For lambda = (1, -1, sqrt 2) the divisors |(P, lambda) - lambda_j| do not
# stay away from zero.  Their floors rho_m decay like m^(-gamma) with
# gamma close to 1, the irrationality measure of sqrt 2 minus one.

import math

from gevreylab import LinearPart, fit_diophantine_type, rho_sequence, small_divisor_profile

lp = LinearPart((1, -1, math.sqrt(2)))

prof = small_divisor_profile(lp, 200, 6)
print("omega_k:", prof.omega)
print("Bruno partial sums:", prof.bruno_partial_sums)

# Strict records of rho_m and the fitted power law.

for m in prof.fit.records:
    print(f"  m={int(m):4d}  rho_m={prof.rho.at(m):.3e}")
print(f"gamma (all P) = {prof.fit.gamma:.3f}")

# Restricting to |P| >= 2 drops the linear record at m = 1.

nonlin = rho_sequence(lp, 200, min_degree=2)
print(f"gamma (|P| >= 2) = {fit_diophantine_type(nonlin).gamma:.3f}")

# The resonant pair alone has rho_m = 1 for all m >= 2.

print("lambda=(1,-1):", sorted({float(v) for v in rho_sequence(LinearPart((1, -1)), 50, min_degree=2).values}))
