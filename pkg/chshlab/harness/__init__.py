"""
The four-way protocol: Eve's choice between CHSH games, state tomography, process tomography and
the computation, the shared message timing, and the ordering and blindness checks.
"""

from .timing import ALICE_WIDTH, DUMMY, PRELUDE_ROUNDS, Timeline, device_pattern, pad
from .devices import BELL_STABILIZERS, ProverPair, bell_index, syndrome_bits
from .computation import ComputationSet, bob_rounds, check_circuit, run_computation, sigma_layout
from .nodes import choose_subprotocol
from .graph import HarnessState, build_protocol_graph, paper_scale_parameters, protocol_graph, run_batch, run_protocol
from .equivalence import adaptive_equivalence_test, alice_first, alice_plan, bob_first, swapped_layout
from .blindness import alice_view, blindness_check, bob_view, canonical_pattern

__all__ = [
    "ALICE_WIDTH", "DUMMY", "PRELUDE_ROUNDS", "Timeline", "device_pattern", "pad",
    "BELL_STABILIZERS", "ProverPair", "bell_index", "syndrome_bits",
    "ComputationSet", "bob_rounds", "check_circuit", "run_computation", "sigma_layout",
    "choose_subprotocol",
    "HarnessState", "build_protocol_graph", "paper_scale_parameters", "protocol_graph", "run_batch",
    "run_protocol",
    "adaptive_equivalence_test", "alice_first", "alice_plan", "bob_first", "swapped_layout",
    "alice_view", "blindness_check", "bob_view", "canonical_pattern",
]
