"""Spectral statistics of quantum star graphs.

A star graph with v bonds of lengths L_1..L_v has eigenvalues at the
zeros of Z(k) = sum_j tan(k L_j), interlaced with the tangent poles.
This package computes such spectra and eigenfunctions, the limit
densities their normalized statistics converge to (Cauchy for Z/v,
a heavy-tailed law P for Z'(k_n)/v^2, an amplitude law Q for v^2 A_i,
and the Abel transform of Q for eigenfunction values), Monte Carlo
estimates over the invariant measure of the underlying torus flow,
and the analogous Cauchy test for spectral sums over a rectangle
billiard's spectrum.

Modules:

    model       bond lengths, sampling boxes, seeds, configuration
    reduction   argument reduction of k*L modulo pi
    specfun     erf/erfc, the Dawson function, weighted quadrature
    secular     Z, Z', pole grids, eigenvalues, amplitudes
    densities   limit densities P and Q, tails, Abel transform
    torus       invariant-measure Monte Carlo and eigenvalue averages
    stats       empirical distributions, KS distance, histograms
    seba        rectangle spectrum, spectral-sum and coefficient laws
    reproduce   deterministic figure presets with file outputs
    acceptance  the quantitative pass/fail criteria suite
    cli         command-line interface over all of the above
"""

from .errors import (
    BracketError,
    GuardViolationError,
    LengthCollisionError,
    NonFiniteIntegrandError,
    NonMonotoneCDFError,
    NumericalError,
    PoleMergeError,
)
from .model import (
    BondLengths,
    LengthBox,
    RunConfig,
    generate_lengths,
    load_config,
    mean_density,
    stream,
)
from .secular import (
    Eigenfunction,
    PoleGrid,
    SpectralPoint,
    amplitudes,
    build_pole_grid,
    eigenvalue_ensemble,
    eigenvalue_window,
    eigenvalues,
    eval_z,
    eval_z_prime,
    weyl_count_check,
)
from .specfun import QuadratureRule, dawson, erf, erfc, gauss_weighted_integral
from .densities import (
    DensityCurve,
    abel_value_distribution,
    cauchy_cdf,
    cauchy_pdf,
    limit_p,
    limit_q,
    m_profile,
    p_curve,
    q_curve,
    q_tail_coefficient,
)
from .torus import (
    SurfaceEstimate,
    SurfaceSample,
    eigenvalue_average,
    finite_v_pv,
    finite_v_qv,
    jacobian,
    sample_surface,
    surface_average,
)
from .stats import (
    EmpiricalDistribution,
    histogram,
    ks_99_threshold,
    ks_distance,
    sample_z_over_k,
    sample_z_over_lengths,
)
from .seba import (
    RectangleSpectrum,
    SebaWindow,
    rectangle_levels,
    seba_coefficient_samples,
    seba_determinant_samples,
    seba_window,
)
from .reproduce import PRESETS, ExperimentPreset, run_preset

__version__ = "0.1.0"

__all__ = [
    "BondLengths", "LengthBox", "RunConfig", "generate_lengths",
    "load_config", "mean_density", "stream",
    "Eigenfunction", "PoleGrid", "SpectralPoint", "amplitudes",
    "build_pole_grid", "eigenvalue_ensemble", "eigenvalue_window",
    "eigenvalues", "eval_z", "eval_z_prime", "weyl_count_check",
    "QuadratureRule", "dawson", "erf", "erfc", "gauss_weighted_integral",
    "DensityCurve", "abel_value_distribution", "cauchy_cdf", "cauchy_pdf",
    "limit_p", "limit_q", "m_profile", "p_curve", "q_curve",
    "q_tail_coefficient",
    "SurfaceEstimate", "SurfaceSample", "eigenvalue_average", "finite_v_pv",
    "finite_v_qv", "jacobian", "sample_surface", "surface_average",
    "EmpiricalDistribution", "histogram", "ks_99_threshold", "ks_distance",
    "sample_z_over_k", "sample_z_over_lengths",
    "RectangleSpectrum", "SebaWindow", "rectangle_levels",
    "seba_coefficient_samples", "seba_determinant_samples", "seba_window",
    "PRESETS", "ExperimentPreset", "run_preset",
    "BracketError", "GuardViolationError", "LengthCollisionError",
    "NonFiniteIntegrandError", "NonMonotoneCDFError", "NumericalError",
    "PoleMergeError",
    "__version__",
]
