"""Numerical thermodynamic formalism on symbolic dynamical systems.

Compute finite-depth topological pressure of (sub-)additive word
potentials, bracket it via subadditivity and bridging certificates,
and derive exponent-level-set spectra, domains, subdifferentials and
ratio spectra through grid-based Legendre transforms.
"""

__version__ = "0.1.0"

from .symbolic import (ShiftSpace, enumerate_words, iter_word_blocks,
                       word_count, block_recode)
from .potentials import (NEG_INF, ADDITIVE, SUBADDITIVE, UNKNOWN,
                         WordPotential, WindowFunction, birkhoff_potential,
                         constant_potential, linear_combination,
                         measure_potential, additive_approximation)
from .cocycle import (MatrixCocycle, norm_potential, singular_value_potential,
                      check_irreducibility, check_submultiplicativity,
                      search_bridging_constant, BridgingCertificate)
from .measures import (MarkovMeasure, markov_measure, bernoulli_measure,
                       entropy, lyapunov_exponent, affinity_defect,
                       equilibrium_search, sample_trajectory)
from .pressure import (finite_pressure, finite_pressure_grid, pressure_estimate,
                       pressure_curve, pressure_kd, pressure_kd_grid,
                       variational_gap, level_summaries, PressureCurve,
                       POSITIVE_Q, ALL_Q)
from .convex import (GridFunction, conjugate, legendre_infimum, subdifferential,
                     asymptotic_slope, biconjugate, biconjugate_check,
                     directional_derivative, subgradient_polygon,
                     SubdiffInterval, LegendreResult)
from .spectrum import (lyapunov_domain, spectrum_value, spectrum_curve,
                       joint_spectrum, membership, ratio_spectrum,
                       SpectrumCurve, INSIDE, OUTSIDE, BOUNDARY)
from .catalog import load_example, example_document, BUILTIN_EXAMPLES, \
    MaxAffinePressure

__all__ = [name for name in dir() if not name.startswith("_")]
