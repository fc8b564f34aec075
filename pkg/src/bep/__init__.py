"""Bounded extremal problems in the Hardy space of the unit disk."""

import os as _os

# Cap numerical-library parallelism before numpy loads: reports must be
# bit-reproducible for a fixed thread count.
_threads = _os.environ.get("BEP_THREADS")
if _threads:
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        _os.environ.setdefault(_var, _threads)

from .arcs import ArcSet
from .fourier import (
    FourierSeries,
    Grid,
    GridFunction,
    conjugate_function,
    fft_analyze,
    fft_synthesize,
    inner_product,
    norm_l2,
    norm_sup,
    project_minus,
    project_plus,
)
from .hardy import (
    BlaschkeProduct,
    OuterFunction,
    blaschke_eval,
    cauchy_eval,
    eval_disk,
    outer_from_modulus,
    riesz_herglotz,
)
from .poly import (
    PolyProblem,
    PolySolution,
    convergence_study,
    gram_matrix,
    kkt_certificate,
    solve_fbep,
)
from .recovery import QuenchingFunction, quenching_function, recover_sequence
from .solver import (
    BepProblem,
    BepSolution,
    DualState,
    SolverOptions,
    carleman_g_mu,
    dual_gradient,
    dual_value,
    herglotz_check,
    kkt_residuals,
    lp_bound_check,
    normalize_problem,
    solve_bep,
    solve_toeplitz,
    toeplitz_apply,
)

__all__ = [
    "ArcSet",
    "BepProblem",
    "BepSolution",
    "BlaschkeProduct",
    "DualState",
    "FourierSeries",
    "Grid",
    "GridFunction",
    "OuterFunction",
    "PolyProblem",
    "PolySolution",
    "QuenchingFunction",
    "SolverOptions",
    "blaschke_eval",
    "carleman_g_mu",
    "cauchy_eval",
    "conjugate_function",
    "convergence_study",
    "dual_gradient",
    "dual_value",
    "eval_disk",
    "fft_analyze",
    "fft_synthesize",
    "gram_matrix",
    "herglotz_check",
    "inner_product",
    "kkt_certificate",
    "kkt_residuals",
    "lp_bound_check",
    "norm_l2",
    "norm_sup",
    "normalize_problem",
    "outer_from_modulus",
    "project_minus",
    "project_plus",
    "quenching_function",
    "recover_sequence",
    "riesz_herglotz",
    "solve_bep",
    "solve_fbep",
    "solve_toeplitz",
    "toeplitz_apply",
]
