"""
Dense linear algebra core: operators, Pauli strings, Jordan blocks and metric bounds.
"""

from .operators import (
    CNOT, EPR, G, H, I2, KET0, KET1, X, Y, Z,
    SuperOperator, apply_isometry, apply_local, as_reflection, dagger, embed, flip,
    gram_trace_distance, kron, outer,
    partial_trace, random_density, random_reflection, random_state, random_superoperator,
    random_unitary, reduced_state, trace_norm,
)
from .pauli import PauliString, all_strings, conjugate_by, identify_pauli
from .jordan import (
    JordanBlock, extended_operator, extended_reflections, jordan_decompose, jordan_isometry,
    reconstruct,
)
from .register import QubitRegister, epr_register, reflection_projector
from .bounds import (
    block_close_gap, block_diag_distance, block_epsilon, gentle_measurement_residual,
    hermitian_to_reflection, markov_unit_ball, pure_parts_gap, reflection_rounding_bound,
    round_to_reflection, vector_vs_trace_distance,
)

__all__ = [
    "CNOT", "EPR", "G", "H", "I2", "KET0", "KET1", "X", "Y", "Z",
    "SuperOperator", "apply_isometry", "apply_local", "as_reflection", "dagger", "embed", "flip",
    "gram_trace_distance", "kron", "outer",
    "partial_trace", "random_density", "random_reflection", "random_state",
    "random_superoperator", "random_unitary", "reduced_state", "trace_norm",
    "PauliString", "all_strings", "conjugate_by", "identify_pauli",
    "QubitRegister", "epr_register", "reflection_projector",
    "JordanBlock", "extended_operator", "extended_reflections", "jordan_decompose",
    "jordan_isometry", "reconstruct",
    "block_close_gap", "block_diag_distance", "block_epsilon", "gentle_measurement_residual",
    "hermitian_to_reflection", "markov_unit_ball", "pure_parts_gap",
    "reflection_rounding_bound", "round_to_reflection", "vector_vs_trace_distance",
]
