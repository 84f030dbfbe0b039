"""Holonomic two-qubit gates from adiabatic loops of two-mode boson controls."""

from ._backend import COMPILED
from .connection import (
    ConnectionSample,
    CurvatureSample,
    HatMatrices,
    ParamPoint,
    VacuumFrame,
    connection_analytic,
    connection_batch,
    connection_numeric,
    curvature_analytic,
    curvature_numeric,
    hat_matrices,
    kerr_hamiltonian,
    projector,
    vacuum_frame,
)
from .coherent import (
    matrix_exp,
    su2_generators,
    su11_generators,
    u_disentangled,
    u_op,
    v_disentangled,
    v_op,
)
from .fock import (
    FockOperator,
    FockSpace,
    FockVector,
    annihilator,
    basis_state,
    commutator,
    creator,
    number_op,
)
from .holonomy import (
    Arc,
    HolonomyResult,
    Line,
    LoopPath,
    apply_gate,
    compose,
    holonomy,
    holonomy_algebra_dimension,
    log_unitary,
    point_loop,
    rectangle_loop,
    reverse,
    square_loop,
)
from .synth import (
    LoopFamily,
    SynthResult,
    double_rect_family,
    gate_fidelity,
    reachability_residual,
    rect_xi_at_zeta_family,
    rect_xi_family,
    rect_zeta_family,
    synthesize,
)

__all__ = [
    "COMPILED",
    "Arc",
    "ConnectionSample",
    "CurvatureSample",
    "FockOperator",
    "FockSpace",
    "FockVector",
    "HatMatrices",
    "HolonomyResult",
    "Line",
    "LoopFamily",
    "LoopPath",
    "ParamPoint",
    "SynthResult",
    "VacuumFrame",
    "annihilator",
    "apply_gate",
    "basis_state",
    "commutator",
    "compose",
    "connection_analytic",
    "connection_batch",
    "connection_numeric",
    "creator",
    "curvature_analytic",
    "curvature_numeric",
    "double_rect_family",
    "gate_fidelity",
    "hat_matrices",
    "holonomy",
    "holonomy_algebra_dimension",
    "kerr_hamiltonian",
    "log_unitary",
    "matrix_exp",
    "number_op",
    "point_loop",
    "projector",
    "reachability_residual",
    "rect_xi_at_zeta_family",
    "rect_xi_family",
    "rect_zeta_family",
    "rectangle_loop",
    "reverse",
    "square_loop",
    "su11_generators",
    "su2_generators",
    "synthesize",
    "u_disentangled",
    "u_op",
    "v_disentangled",
    "v_op",
    "vacuum_frame",
]

__version__ = "0.1.0"
