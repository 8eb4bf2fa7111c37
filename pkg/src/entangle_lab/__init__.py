"""Exact entanglement analysis for graph-like quantum states.

States are vectors over Z[w], w = exp(i*pi/4), with a power-of-sqrt(2)
scale, so the transforms used here stay exact. Linear codes, phase
polynomials and state vectors convert into one another.
"""

from .apf import (
    Anf,
    Apf,
    BipartiteSplit,
    apply_h_symbolic,
    code_to_lp,
    connection_matrix,
    expand,
    fast_par_by_rank,
    is_lp,
    parse_anf,
    parse_apf,
    print_anf,
    print_apf,
    quadratic_form,
    rank_multispectra,
    reduce_apf,
    reduce_to_indicator,
)
from .entanglement import (
    OptimizerConfig,
    crypto_profile,
    greedy_trajectory,
    par_l_exact_lp,
    par_l_optimize,
    parl_bounds,
    run_trajectory,
    se_search,
    weight_hierarchy_spectral,
)
from .errors import (
    CrossCheckError,
    DimensionTooLarge,
    EntangleLabError,
    ParseError,
    PreconditionError,
    UnsupportedCase,
)
from .gf2 import BinaryMatrix, LinearCode, dual_code, weight_hierarchy_oracle
from .state import StateVector, indicator_from_code, measure, par, tensor_factorize
from .transforms import H, I, NH, apply_gate, apply_h, hi_multispectra, wht

__version__ = "0.1.0"

__all__ = [
    "Anf",
    "Apf",
    "BinaryMatrix",
    "BipartiteSplit",
    "CrossCheckError",
    "DimensionTooLarge",
    "EntangleLabError",
    "H",
    "I",
    "LinearCode",
    "NH",
    "OptimizerConfig",
    "ParseError",
    "PreconditionError",
    "StateVector",
    "UnsupportedCase",
    "apply_gate",
    "apply_h",
    "apply_h_symbolic",
    "code_to_lp",
    "connection_matrix",
    "crypto_profile",
    "dual_code",
    "expand",
    "fast_par_by_rank",
    "greedy_trajectory",
    "hi_multispectra",
    "indicator_from_code",
    "is_lp",
    "measure",
    "par",
    "par_l_exact_lp",
    "par_l_optimize",
    "parl_bounds",
    "parse_anf",
    "parse_apf",
    "print_anf",
    "print_apf",
    "quadratic_form",
    "rank_multispectra",
    "reduce_apf",
    "reduce_to_indicator",
    "run_trajectory",
    "se_search",
    "tensor_factorize",
    "weight_hierarchy_oracle",
    "weight_hierarchy_spectral",
    "wht",
    "__version__",
]
