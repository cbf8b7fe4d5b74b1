"""Exact simulation of one-dimensional quantum and classical walks and of the
crossover between them under repeated position measurement."""

from ._errors import ContractError, PrecisionError, QWError, ResourceError, TruncationError
from .classical import (correlated_asymptotic_distribution, correlated_asymptotic_pmf,
                        correlated_rw_distribution, lazy_asymptotic_distribution,
                        lazy_asymptotic_pmf, lazy_rw_closed_form, lazy_rw_distribution)
from .ctqw import (CtqwParams, ctqw_amplitudes, ctqw_distribution, ctqw_integrate_oracle,
                   ctrw_distribution)
from .diagnostics import (ConvergenceReport, PhaseCell, classify_region, convergence_report,
                          evaluate_cell, ks_distance, moments, phase_diagram, predicted_law,
                          scaling_exponent)
from .limits import (Arcsine, AsymArcsine, Delta, DTQWLaw, Gaussian, LatticeI, LatticeJ,
                     LimitLaw, ftd_bessel_distribution, ftd_bessel_pmf, hybrid_lattice_pmf,
                     law_cdf)
from .measurement import (PhasePoint, Schedule, compose_pm, continuous_power_schedule,
                          convolve, convolve_power, ctqw_pm_distribution,
                          dtqw_pm_distribution, ftd_ppm_distribution, ftd_rate,
                          geometric_schedule, power_schedule, theta, validate_assumption)
from .specfun import BesselRow, bessel_i, bessel_i_row, bessel_i_scaled, bessel_j, bessel_j_row
from .walk import (CoinOperator, CoinState, Distribution, WalkState, check_symmetric,
                   dtqw_distribution, dtqw_evolve, dtqw_step, ftd_coin, hadamard, preset_coin,
                   sigma_squared, spectral_sigma_squared, symmetric_state)

__version__ = "0.1.0"
