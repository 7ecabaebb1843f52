"""Isoperimetric weights, profiles and the inequalities they control, checked numerically.

Spaces are weighted point clouds (grids, equal-area sphere cells, log-concave
lines).  On them the package computes decreasing rearrangements and
rearrangement-invariant norms, isoperimetric profiles, weight constants, and
verifies Poincare, coarea, uncertainty, Sobolev and Strichartz inequalities.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .spaces import Field, SampleSpace, build_space, gradient_modulus, measure_of, minkowski_content, minkowski_estimate
from .rearrange import (
    RiNormSpec, StepFunction, decreasing_rearrangement, distribution_function, maximal_average, median,
    ri_norm, ri_norm_of_function,
)
from .profiles import Profile, jubileo_constant, make_profile, phi, profile_value, validate_profile_against_space
from .weights import (
    analyze_weight, construct_weight, dt_constant, isoperimetric_constant, marcinkiewicz_weight_norm,
    necessary_condition_check, prototype_g,
)
from .inequalities import (
    InequalityReport, TestFunction, brezis_wainger_report, coarea_check, hardy_operator,
    hardy_operator_norm_estimate, local_poincare, ri_sobolev, strichartz_check, transference_check,
    uncertainty_additive, uncertainty_multiplicative,
)
