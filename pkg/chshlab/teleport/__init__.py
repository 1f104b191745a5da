"""
Computation by teleportation: circuits over {H, G, CNOT}, Pauli frames, gadget resource blocks,
the schedule compiler and the executor.
"""

from .circuit import (
    Circuit, Gate, all_circuits, direct_simulate, final_state, format_circuit, parse_circuit,
    random_circuit, total_variation,
)
from .frame import BELL_LETTERS, G_RULE, PauliFrame, frame_conjugate, outcome_parity, outcome_pauli
from .resources import (
    BLOCK_QUBITS, SLOT_ORDER, SLOT_POSITIONS, ResourceState, block_state, decode_outcome,
    encode_outcome, gadget_basis, outcome_bits, resource_states, slot_basis,
)
from .devices import (
    BELL_PROJECTORS, ComputeAlice, ComputeBob, HonestComputeAlice, HonestComputeBob,
    NoisyComputeBob, honest_bob_block,
)
from .compiler import AdaptiveBranch, BellMeasure, Prepare, TeleportSchedule, block_count, compile_circuit
from .executor import (
    ExecutionResult, StepEngine, Track, advance_exact, bell_branches, block_layout, equivalence_check,
    exact_distribution, execute, forget_qubits, prepare_blocks, run_schedule, sample_outputs, used_slots,
)

__all__ = [
    "Circuit", "Gate", "all_circuits", "direct_simulate", "final_state", "format_circuit",
    "parse_circuit", "random_circuit", "total_variation",
    "BELL_LETTERS", "G_RULE", "PauliFrame", "frame_conjugate", "outcome_parity", "outcome_pauli",
    "BLOCK_QUBITS", "SLOT_ORDER", "SLOT_POSITIONS", "ResourceState", "block_state",
    "decode_outcome", "encode_outcome", "gadget_basis", "outcome_bits", "resource_states",
    "slot_basis",
    "BELL_PROJECTORS", "ComputeAlice", "ComputeBob", "HonestComputeAlice", "HonestComputeBob",
    "NoisyComputeBob", "honest_bob_block",
    "AdaptiveBranch", "BellMeasure", "Prepare", "TeleportSchedule", "block_count",
    "compile_circuit",
    "ExecutionResult", "StepEngine", "Track", "advance_exact", "bell_branches", "block_layout",
    "equivalence_check", "exact_distribution", "execute", "forget_qubits", "prepare_blocks",
    "run_schedule", "sample_outputs", "used_slots",
]
