"""Noncommutative tori with real multiplication: exact SL2(Z) data,
Heisenberg bimodules with connections, certified theta constants and the
graded coordinate rings they generate."""

from .coord_ring import (
    RingElement,
    StructureTensor,
    check_generation,
    check_quadratic,
    mult,
    piece_dim,
    ring_report,
    structure_tensor,
)
from .heis_module import (
    IllConditionedSolve,
    ModuleElement,
    balanced_product,
    connection,
    curvature,
    holomorphic_element,
    left_act,
    matched_product,
    module_residuals,
    right_act,
)
from .heis_rep import (
    FiniteHeisenberg,
    FiniteVector,
    GaussianAtom,
    HeisElement,
    RealHeisenberg,
    SchwartzVector,
    holomorphic_residual,
    holomorphic_vector,
    isotropic_check,
    lie_derivative,
)
from .qfield import (
    LatticeElement,
    QuadIrr,
    RMData,
    SL2Matrix,
    cf_expand,
    fixing_matrix,
    moebius_act,
    multiplier_ring,
    rank_value,
)
from .theta import ThetaQuery, ThetaResult, tail_bound, theta_const, theta_fn, theta_partial
from .torus_alg import TorusElement, derive, multiply, star, trace

__all__ = [
    "FiniteHeisenberg",
    "FiniteVector",
    "GaussianAtom",
    "HeisElement",
    "IllConditionedSolve",
    "LatticeElement",
    "ModuleElement",
    "QuadIrr",
    "RMData",
    "RealHeisenberg",
    "RingElement",
    "SL2Matrix",
    "SchwartzVector",
    "StructureTensor",
    "ThetaQuery",
    "ThetaResult",
    "TorusElement",
    "balanced_product",
    "cf_expand",
    "check_generation",
    "check_quadratic",
    "connection",
    "curvature",
    "derive",
    "fixing_matrix",
    "holomorphic_element",
    "holomorphic_residual",
    "holomorphic_vector",
    "isotropic_check",
    "left_act",
    "lie_derivative",
    "matched_product",
    "module_residuals",
    "moebius_act",
    "mult",
    "multiplier_ring",
    "multiply",
    "piece_dim",
    "rank_value",
    "right_act",
    "ring_report",
    "star",
    "structure_tensor",
    "tail_bound",
    "theta_const",
    "theta_fn",
    "theta_partial",
    "trace",
]
