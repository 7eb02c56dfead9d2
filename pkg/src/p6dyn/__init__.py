"""Chaotic dynamics of the Poincare return maps of Painleve VI, realized as
involutive birational dynamics on an affine cubic surface.

The package computes, exactly where the theory is exact and numerically where
it is not: word reduction in the fundamental group of the thrice-punctured
sphere, the trace invariant and dynamical degree on cohomology, entropy,
exact periodic-point counts, the 27-line catalogue of the cubic, orbit
iteration, Lyapunov exponents, and an independent Gauss-Newton oracle that
recounts periodic points numerically.
"""

from .words import (
    CoxeterWord,
    LoopWord,
    WordClass,
    WordParseError,
    classify,
    cyclic_reduce,
    free_reduce,
    invert,
    loop_to_coxeter,
    coxeter_to_loop,
    minimal_form,
    parse_coxeter_word,
    parse_loop_word,
    parse_word,
)
from .params import (
    BParams,
    KAPPA_STAR,
    KappaParams,
    MonodromyData,
    ThetaParams,
    a_to_theta,
    b_to_a,
    discriminant,
    kappa_params,
    kappa_to_a,
    kappa_to_b,
    on_wall,
    resolve_parameters,
    rh,
)
from .cohomology import (
    SpectralReport,
    SurdValue,
    alpha,
    char_poly_V,
    count_table,
    decompose_check,
    lambda1,
    periodic_count,
    s_product,
    sigma_star_product,
    spectral_radius_limit_check,
    spectral_report,
)
from .surface import (
    LineSpec,
    LinesCatalog,
    f_eval,
    g_apply,
    line_exchange_check,
    lines_catalog,
    sigma_apply,
    sigma_projective,
    word_apply,
)
from .ergodic import (
    FixedPointSet,
    LyapunovEstimate,
    OrbitRecord,
    count_consistency,
    find_fixed_points,
    iterate_orbit,
    lyapunov,
)

__version__ = "0.1.0"
