"""waringlab: exact counting and bound verification for Waring-type sums
of floors of pseudo-polynomials."""

from .pseudopoly import (ArcMembershipError, ArcSetup, CertificationError,
                         CertifiedValue, DomainError, NoSolutionError,
                         ParseError, PseudoPolynomial, default_v, derivative,
                         eval_with_error, floor_eval, floor_values,
                         largest_preimage, nearest_int_distance, p_deviation,
                         theorem_constants)
from .repcount import (BudgetError, CountsVector, RepTable, counts_vector,
                       rep_count_bruteforce, rep_count_exact, unrepresentable)
from .ntt import PRIME_SET_A, PRIME_SET_B, PrimeSetError
from .majorarc import (BoundReport, MainTermConvention, QuadratureResult,
                       F_sum, V_sum, check_V_bound, compare_F_V, exact_Js,
                       gamma_main_term, nathanson_sum, reports_to_csv,
                       singular_integral_quadrature)
from .expsum import (DyadicPlan, HypothesisError, MinorArcError,
                     PhaseFunction, VinogradovCount, bdg_bound,
                     classify_and_bound, fractional_count_check,
                     kusmin_landau_bound, minor_arc_sup,
                     van_der_corput_bound, vinogradov_integral,
                     vinogradov_prop_bound, weyl_sum)
from .vaaler import (FloorDecomposition, TrigPolyApprox, check_vaaler_error,
                     fejer_majorant, floor_decomposition_terms, vaaler_approx,
                     vaaler_multiplier)

__version__ = "0.1.0"
