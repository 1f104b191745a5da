# resources.py

"""
Resource states and the eleven-qubit gadget block.

A block holds one copy of each resource family, Pauli-decorated by Bob's outcome:

    slot   positions   family
    prep   0           P|0⟩                              (readout ancilla or fresh qubit)
    I      1-2         (I ⊗ P)|ψ*⟩
    H      3-4         (I ⊗ H P)|ψ*⟩
    G      5-6         (I ⊗ G P)|ψ*⟩
    CNOT   7-10        CNOT_{2,4} P_2 Q_4 (|ψ*⟩_{12} ⊗ |ψ*⟩_{34})

Digits index the decorations with the Bell labels 0=I, 1=X, 2=Z, 3=Y; the CNOT slot digit is
4·p + q. Stored vectors carry their real representative, so each decoration records the power
of i that links it to the plain Pauli.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from chshlab.errors import ValidationError
from chshlab.linalg.operators import CNOT, EPR, G, H, I2, KET0, embed, kron
from chshlab.linalg.pauli import LETTER_MATRICES, PauliString
from chshlab.teleport.frame import BELL_LETTERS
from chshlab.tomography.state import ProductBasis
from chshlab.tomography.xz import XZBasisSet, real_phase

logger = logging.getLogger("chshlab.teleport.resources")

SLOT_ORDER = ("prep", "I", "H", "G", "CNOT")
SLOT_POSITIONS: Dict[str, Tuple[int, ...]] = {
    "prep": (0,),
    "I": (1, 2),
    "H": (3, 4),
    "G": (5, 6),
    "CNOT": (7, 8, 9, 10),
}
SLOT_GATES = {"I": I2, "H": H, "G": G}
BLOCK_QUBITS = 11


@dataclass(frozen=True, eq=False)
class ResourceState:
    """stored state = (I ⊗ U · decoration)|ψ*⟩ exactly, decoration phase included"""

    slot: str
    digit: int
    decoration: PauliString
    state: np.ndarray


def _power_of_i(ideal: np.ndarray, stored: np.ndarray) -> int:
    c = np.vdot(ideal, stored)
    if abs(abs(c) - 1) > 1e-10:
        raise ValidationError("stored resource is not a phase multiple of the ideal one")
    return int(round(np.angle(c) / (np.pi / 2))) % 4


def _family(slot: str) -> List[ResourceState]:
    out = []
    if slot == "prep":
        for d, letter in enumerate("IX"):
            out.append(ResourceState(slot, d, PauliString(letter), LETTER_MATRICES[letter] @ KET0))
    elif slot in SLOT_GATES:
        u = SLOT_GATES[slot]
        for d, letter in enumerate(BELL_LETTERS):
            ideal = kron(I2, u @ LETTER_MATRICES[letter]) @ EPR
            stored = real_phase(ideal)
            out.append(ResourceState(slot, d, PauliString(letter, _power_of_i(ideal, stored)), stored))
    elif slot == "CNOT":
        cnot = embed(CNOT, [2] * 4, [1, 3])
        pairs = np.kron(EPR, EPR)
        for p, a in enumerate(BELL_LETTERS):
            for q, b in enumerate(BELL_LETTERS):
                ideal = cnot @ kron(I2, LETTER_MATRICES[a], I2, LETTER_MATRICES[b]) @ pairs
                stored = real_phase(ideal)
                out.append(ResourceState(slot, 4 * p + q, PauliString(a + b, _power_of_i(ideal, stored)), stored))
    else:
        raise ValidationError(f"unknown resource slot '{slot}'")
    return out


@functools.lru_cache(maxsize=None)
def resource_states() -> Dict[str, Tuple[ResourceState, ...]]:
    """Every Pauli-decorated resource state, by slot; entry d has digit d."""
    return {slot: tuple(_family(slot)) for slot in SLOT_ORDER}


@functools.lru_cache(maxsize=None)
def slot_basis(slot: str) -> XZBasisSet:
    family = resource_states()[slot]
    return XZBasisSet(len(SLOT_POSITIONS[slot]), tuple(r.state for r in family), name=f"{slot}-resource")


@functools.lru_cache(maxsize=None)
def gadget_basis() -> ProductBasis:
    """The honest block basis: the product of the five slot bases, slot order as in SLOT_ORDER."""
    return ProductBasis(tuple(slot_basis(s) for s in SLOT_ORDER))


def decode_outcome(outcome: int) -> Dict[str, ResourceState]:
    """Bob's block outcome -> the decorated resource in every slot."""
    digits = gadget_basis().split(outcome)
    catalog = resource_states()
    return {slot: catalog[slot][d] for slot, d in zip(SLOT_ORDER, digits)}


def encode_outcome(digits: Dict[str, int]) -> int:
    return gadget_basis().merge([digits[s] for s in SLOT_ORDER])


def outcome_bits(outcome: int) -> Tuple[int, ...]:
    """The eleven reported bits, most significant (prep slot) first."""
    if not 0 <= outcome < 2 ** BLOCK_QUBITS:
        raise ValidationError(f"block outcome {outcome} out of range")
    return tuple((outcome >> (BLOCK_QUBITS - 1 - i)) & 1 for i in range(BLOCK_QUBITS))


def block_state(outcome: int) -> np.ndarray:
    """Alice's eleven-qubit resource state for a reported outcome."""
    resources = decode_outcome(outcome)
    return kron(*(resources[s].state for s in SLOT_ORDER))
