"""Formal normal forms, small divisors and Gevrey orders of 1-resonant vector fields.

The pipeline follows a system ``z**(k+1) x' = (Lambda + z**k A) x + z**k f(z, x)``
from its linear part (resonances, small divisors) through the formal
normalizing transformation, its Borel-plane image, and Borel-Laplace
summation with empirical Gevrey-order fits.
"""
__version__ = "0.1.0"

from .errors import (DimensionError, FitDomainError, GevreyLabError, PreconditionError,
                     SolveError, StructuralError, SummationDirectionError)
from .series_core import (BorelRing, BorelSeries, MonomialBasis, MultiSeries, ZRing, ZSeries,
                          conv, ms_add, ms_mul, ms_substitute, multi_indices)
from .resonance import (LinearPart, VectorFieldSpec, check_hypotheses, check_well_prepared,
                        compute_m0_delta0, detect_resonances, find_resonance_monomial,
                        resonance_report)
from .small_divisors import (bruno_sum, fit_diophantine_type, omega_sequence, rho_sequence,
                             small_divisor_profile)
from .normalization import (NormalizationResult, assemble_tQ, check_monomial_preservation,
                            compute_borel_tables, conjugacy_residual, formal_normalize,
                            ramify_sigma_k, route_equivalence, solve_gQ_ode, verify_bounds)
from .borel_laplace import (GevreyFit, PadeApproximant, SectorSpec, asymptotic_residual_scan,
                            borel_k_formal, borel_sum, gevrey_fit, gevrey_order_of_normalization,
                            laplace_k_numeric, pade_continue, power_sum_envelope)
from .io import corpus_path, load_spec
