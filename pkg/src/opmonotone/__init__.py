"""Operator monotone functions on [0, inf) built from finite measures on [0, 1]."""

from .errors import *  # noqa: F401,F403
from .measure import (
    Atom,
    DensitySpec,
    LoewnerDensity,
    LoewnerMeasureSpec,
    Measure,
    SelfSimilarSpec,
    SmoothFactor,
    compare_measures,
    decompose_measure,
    dirac,
    from_loewner,
    is_symmetric_measure,
    lebesgue,
    lin_comb,
    make_measure,
    measure_leq,
    normalize,
    pushforward_reflect,
    total_mass,
)
from .omf import (
    ConvexDecomposition,
    OMFunction,
    catalog,
    closed_form_oracle,
    convex_normalized_decomposition,
    decompose_function,
    evaluate,
    evaluate_symmetric_form,
    is_normalized,
    is_symmetric_function,
    kernel,
    standard_catalog,
    transpose,
)
from .quadrature import QuadratureConfig, integrate_density, integrate_measure, integrate_selfsimilar
from .matrix import (
    apply_function,
    evaluate_by_matrix_quadrature,
    loewner_leq,
    random_ordered_pair,
    sym_eigen,
    weighted_harmonic_mean,
)

__version__ = "0.1.0"
