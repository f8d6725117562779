"""zyglab: numerical laboratory for Holder-Zygmund regularity.

Builds band-limited mollifiers and wavelets with prescribed vanishing
moments, estimates Zygmund regularity of sampled signals by wavelet decay
and Littlewood-Paley analysis, classifies regularization nets through
derivative-growth tables, and checks the closed-form regularity
predictions for a linear ODE and a rough-coefficient transport equation.
"""

from .casestudies import (BoundsViolationError, CoefficientBounds, Net2D,
                          Prediction, char_flow, characteristic_conservation,
                          classify_regularity_2d, mixed_growth_profile,
                          ode_residual, ode_solve, pde_residual,
                          predicted_regularity_ode, predicted_regularity_pde,
                          primitive_net, transport_solve)
from .colombeau import (GrowthTable, Net, OrderClass, RegularityReport,
                        classify_regularity, derivative_net, embed,
                        formula_net, growth_profile, product_net,
                        product_regularity_bound)
from .grid import (Grid, SampledSignal, apply_multiplier, constant_signal,
                   convolve_scaled, make_grid, signal_from_csv,
                   signal_from_function, signal_to_csv, spectral_derivative,
                   sup_norm)
from .kernels import (KernelSpec, LPFamily, Mollifier, Wavelet, bump,
                      make_lp_family, make_mollifier, moment_defect,
                      mw1_defect, mw2_residual, normalize_weakly_radial,
                      partition_residual, smooth_step, spatial_values,
                      wavelet_from_derivative, wavelet_mu,
                      weakly_radial_constant)
from .signals import (CorpusRow, SignalRecipe, corpus, corpus_grid,
                      corpus_to_dir, cusp, delta_comb, dyadic_sum, heaviside,
                      plateau, tone, complex_tone, weierstrass,
                      weierstrass_exponent)
from .transforms import (DecayFit, InsufficientDataError, ScaleGrid,
                         Scalogram, besov_exponent, cwt, decay_exponent,
                         dyadic_besov_exponent, lp_block,
                         reconstruction_residual, synthesis,
                         wavelet_decay_exponent, zygmund_seminorm)

__version__ = "0.1.0"
