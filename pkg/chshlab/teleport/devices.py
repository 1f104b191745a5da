# devices.py

"""
Provers for the computation sub-protocol.

Bob is handed the eleven pair positions of a block and reports one outcome in [2^11]; Alice
is handed two qubits (a logical carrier and a resource input) and reports a Bell outcome in
[4]. Devices act only on their own halves of the shared register.
"""

import logging
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from chshlab.errors import DeviceViolation, ValidationError
from chshlab.linalg.operators import EPR, kron, outer
from chshlab.linalg.pauli import LETTER_MATRICES
from chshlab.linalg.register import Label, QubitRegister, epr_register
from chshlab.rng import stream
from chshlab.teleport.frame import BELL_LETTERS
from chshlab.teleport.resources import (
    BLOCK_QUBITS, SLOT_ORDER, SLOT_POSITIONS, gadget_basis, outcome_bits, resource_states, slot_basis,
)

logger = logging.getLogger("chshlab.teleport.devices")

BELL_PROJECTORS = [outer(kron(np.eye(2), LETTER_MATRICES[c]) @ EPR) for c in BELL_LETTERS]


class ComputeAlice:
    def bell_measure(self, register: QubitRegister, labels: Tuple[Label, Label], rng: np.random.Generator) -> int:
        raise NotImplementedError


class HonestComputeAlice(ComputeAlice):
    def bell_measure(self, register, labels, rng):
        return register.measure(list(labels), BELL_PROJECTORS, rng)


class ComputeBob:
    def prepare(self, register: QubitRegister, labels: Sequence[Label], rng: np.random.Generator) -> int:
        """Act on Bob's halves of the block's eleven pairs (labels in block position order)."""
        raise NotImplementedError

    def sample_resources(self, rng: np.random.Generator) -> Optional[Tuple[int, Dict[str, np.ndarray]]]:
        """
        (outcome, Alice's collapsed slot states) drawn without simulating Bob's halves, or None
        when the strategy has no such shortcut.
        """
        return None


class HonestComputeBob(ComputeBob):
    """Measures every slot of the block in its resource basis"""

    def prepare(self, register, labels, rng):
        if len(labels) != BLOCK_QUBITS:
            raise ValidationError(f"a block has {BLOCK_QUBITS} positions, got {len(labels)}")
        digits = []
        for slot in SLOT_ORDER:
            positions = [labels[p] for p in SLOT_POSITIONS[slot]]
            # Alice's half collapses to the conjugate vector; the resource vectors are real
            digits.append(register.measure(positions, slot_basis(slot).projectors(), rng))
        return gadget_basis().merge(digits)

    def sample_resources(self, rng):
        catalog = resource_states()
        digits, states = [], {}
        for slot in SLOT_ORDER:
            d = int(rng.integers(len(catalog[slot])))
            digits.append(d)
            states[slot] = catalog[slot][d].state
        return gadget_basis().merge(digits), states


class NoisyComputeBob(HonestComputeBob):
    """Honest preparation; with probability p the report is replaced by a uniform outcome"""

    def __init__(self, p: float):
        if not 0 <= p <= 1:
            raise ValidationError(f"noise probability {p} outside [0, 1]")
        self.p = p

    def _garble(self, outcome: int, rng: np.random.Generator) -> int:
        if rng.random() < self.p:
            return int(rng.integers(2 ** BLOCK_QUBITS))
        return outcome

    def prepare(self, register, labels, rng):
        return self._garble(super().prepare(register, labels, rng), rng)

    def sample_resources(self, rng):
        outcome, states = super().sample_resources(rng)
        return self._garble(outcome, rng), states


def checked_outcome(value, size: int, who: str) -> int:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)) or not 0 <= value < size:
        raise DeviceViolation(f"{who} returned {value!r}, expected an integer in [0, {size})")
    return int(value)


def honest_bob_block(seed: int = 0) -> Tuple[Tuple[int, ...], np.ndarray]:
    """
    Bob measures his halves of eleven fresh EPR pairs in the gadget basis. Returns his reported
    bits and Alice's collapsed eleven-qubit state.
    """
    rng = stream(seed, "teleport/bob-block")
    register = epr_register(range(BLOCK_QUBITS))
    outcome = HonestComputeBob().prepare(register, [("B", j) for j in range(BLOCK_QUBITS)], rng)
    states = [register.release([("A", j) for j in SLOT_POSITIONS[s]]) for s in SLOT_ORDER]
    return outcome_bits(outcome), kron(*states)
