"""Numerical toolkit for random dynamical systems.

Cocycles of matrices and of piecewise-affine interval maps over a symbolic
base, finite-time Lyapunov spectra and Oseledets vectors, random sign sets
and their escape rates, and decompositions of random shifts of finite type.
"""
from .base import BaseSystem, SymbolSequence, build_omega_star, is_admissible, shift
from .cocycle import (
    MatrixCocycle,
    OseledetsVectorPath,
    cocycle_product,
    leading_lyapunov,
    lyapunov_of_vector,
    lyapunov_spectrum,
    oseledets_vector,
)
from .errors import RDSError
from .interval_maps import (
    IntervalMapCocycle,
    MarkovPartition,
    PiecewiseAffineMap,
    StepFunction,
    fullspectrum_f,
    pf_apply,
    transfer_matrix_markov,
    ulam_matrix,
)
from .intervals import IntervalUnion
from .metastability import (
    conditional_escape,
    escape_rate_exact,
    escape_rate_monte_carlo,
    sign_sets,
    survivor_set,
    survivor_trace,
    verify_main_theorem,
)
from .pidigits import pi_binary_digits
from .sft import RandomSFT, cylinder_count, decompose, entropy, uniform_aperiodicity

__version__ = "0.1.0"

__all__ = [
    "BaseSystem",
    "SymbolSequence",
    "build_omega_star",
    "is_admissible",
    "shift",
    "MatrixCocycle",
    "OseledetsVectorPath",
    "cocycle_product",
    "leading_lyapunov",
    "lyapunov_of_vector",
    "lyapunov_spectrum",
    "oseledets_vector",
    "RDSError",
    "IntervalMapCocycle",
    "MarkovPartition",
    "PiecewiseAffineMap",
    "StepFunction",
    "fullspectrum_f",
    "pf_apply",
    "transfer_matrix_markov",
    "ulam_matrix",
    "IntervalUnion",
    "conditional_escape",
    "escape_rate_exact",
    "escape_rate_monte_carlo",
    "sign_sets",
    "survivor_set",
    "survivor_trace",
    "verify_main_theorem",
    "pi_binary_digits",
    "RandomSFT",
    "cylinder_count",
    "decompose",
    "entropy",
    "uniform_aperiodicity",
    "__version__",
]
