"""
Tomography: XZ-determined states, the state and process tomography protocols, and the
determination probe.
"""

from .xz import (
    ClosureResult, XZBasisSet, XZStabilizerSet, closure_conjugate, closure_tensor, is_css,
    pauli_coordinate, real_phase, stabilizer_xz_basis, syndrome_determined, xz_strings,
)
from .state import (
    ConstantOutcomeBob, EstimatorTable, HonestStateBob, IdealStateAlice, NoisyStateBob,
    ProductBasis, ShuffledAnswersAlice, StateAlice, StateBob, StateTomographyRun,
    accept_state_tomography, compute_estimators, ideal_tau_expectation,
    product_tomography_verdict, run_state_tomography, slot_run, state_tomography_verdict,
)
from .process import (
    FlipSyndromeAlice, HonestProcessAlice, IdealProcessBob, NoisyProcessBob, ProcessAlice,
    ProcessBob, ProcessTomographyRun, ShiftedAlice, accept_process_tomography,
    count_mismatches, process_tomography_verdict, run_process_tomography,
)
from .probe import empirical_exponent, local_strings, xz_determination_probe

__all__ = [
    "ClosureResult", "XZBasisSet", "XZStabilizerSet", "closure_conjugate", "closure_tensor",
    "is_css", "pauli_coordinate", "real_phase", "stabilizer_xz_basis", "syndrome_determined",
    "xz_strings",
    "ConstantOutcomeBob", "EstimatorTable", "HonestStateBob", "IdealStateAlice", "NoisyStateBob",
    "ProductBasis", "ShuffledAnswersAlice", "StateAlice", "StateBob", "StateTomographyRun",
    "accept_state_tomography", "compute_estimators", "ideal_tau_expectation",
    "product_tomography_verdict", "run_state_tomography", "slot_run", "state_tomography_verdict",
    "FlipSyndromeAlice", "HonestProcessAlice", "IdealProcessBob", "NoisyProcessBob",
    "ProcessAlice", "ProcessBob", "ProcessTomographyRun", "ShiftedAlice",
    "accept_process_tomography", "count_mismatches", "process_tomography_verdict",
    "run_process_tomography",
    "empirical_exponent", "local_strings", "xz_determination_probe",
]
