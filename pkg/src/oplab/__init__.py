"""Composition operators ``C_T f = f ∘ T`` on Orlicz-Sobolev spaces, made computable.

Two carriers are supported: finite atomic measure spaces with exact rational
weights (kernel, injectivity, ascent) and cell-centred grids on boxes in R^1
or R^2 (Sobolev norms, chain rule, boundedness).
"""

__version__ = "0.1.0"

from .analysis import AnalysisReport, AscentResult, KernelDescription, analyze, ascent, is_injective, kernel
from .errors import *  # noqa: F401,F403
from .grid import (
    AffineMap,
    GridDomain,
    GridFunction,
    affine_rn_derivative,
    builtin_function,
    compose,
    sobolev_norm,
    verify_boundedness,
    verify_chain_rule,
    verify_kernel_derivative_vanishing,
    weak_derivative,
)
from .measure import (
    AtomicMeasureSpace,
    AtomMap,
    is_expansive,
    is_measure_preserving,
    is_nonsingular,
    measures_equivalent,
    pushforward,
    rn_chain_factor,
    rn_derivative,
    zero_set,
)
from .orlicz import (
    Custom,
    ExpMinus,
    Power,
    PowerLog,
    delta2_check,
    eval_phi,
    luxemburg_norm,
    modular,
    orlicz_class_member,
)
