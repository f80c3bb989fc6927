"""Eichler cohomology of generalized modular forms of real weight.

Core objects: matrix groups (`modgroup`), multiplier systems and the
stroke operator (`automorphy`), truncated expansions and example forms
(`forms`), Eichler integrals and period cocycles (`eichler`), cocycle
algebra and certificates (`cohomology`), generalized Poincare and
Eisenstein series (`poincare`).  A FastAPI service (`service`) exposes
the operations; the command line (`cli`) is a thin client of it.
"""

from .modgroup import (GroupElement, Subgroup, CuspData, IDENTITY, S, T, INFINITY,
                       cusp_classes, coset_reps_mod_translations, word_decompose,
                       parse_matrix, parse_word)
from .automorphy import (MultiplierSystem, principal_power, principal_arg,
                         consistency_factor, stroke, growth_fit)
from .forms import (FourierExpansion, CuspExpansion, FormClass, classify,
                    delta_expansion, eisenstein_qexp, eta_product_expansion,
                    eta_eval, gmf_example, automorphy_residual, cuspform11_expansion)
from .eichler import (EichlerIntegral, PeriodPolynomial, FunctionPeriod,
                      eichler_integral, bol_check, period_direct, period_integral,
                      period_cocycle, slash_matrix, STANDARD_GRID, PeriodFitError)
from .cohomology import (Cocycle, CoboundaryCertificate, Verdict, GrowthProfile,
                         cocycle_consistency_check, coboundary_test, parabolic_test,
                         shift_by_phi0, infinity_witness, growth_membership_check,
                         fit_growth_profile)
from .poincare import (ThresholdReport, threshold, select_kprime, SeriesConfig,
                       EisensteinSeries, PoincareSeries, eisenstein_eval,
                       poincare_eval, transformation_residual,
                       construct_automorphic_integral, AutomorphicIntegral,
                       NearZeroDenominator)

__version__ = "0.1.0"
