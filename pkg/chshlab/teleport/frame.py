# frame.py

"""
Pauli frames for computation by teleportation.

A frame F on n logical qubits records how the carried state differs from the ideal one:
actual = F · ideal, with

    F = ω^phase ⊗_i H^{h_i} P_i,   ω = e^{iπ/4}

The pending Hadamard h_i appears only right after a G teleportation with an X or Z in the
frame and is removed by the next (adaptively chosen) teleportation.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from chshlab.errors import DimensionError, ValidationError
from chshlab.linalg.operators import CNOT, H, kron
from chshlab.linalg.pauli import LETTER_MATRICES, PauliString, all_strings, conjugate_by

logger = logging.getLogger("chshlab.teleport.frame")

OMEGA = np.exp(1j * np.pi / 4)

# Bell outcome k <-> (I ⊗ Q_k)|ψ*⟩
BELL_LETTERS = "IXZY"


def _clifford_rule(u: np.ndarray, n: int) -> Dict[str, Tuple[int, str]]:
    # letters -> (power of i, letters) with U P U† = i^power P'
    rule = {}
    for p in all_strings(n):
        image = conjugate_by(p, u)
        rule[p.letters] = (image.phase, image.letters)
    return rule


H_RULE = _clifford_rule(H, 1)
CNOT_RULE = _clifford_rule(CNOT, 2)

# G P G† = i^power H^{h} P'
G_RULE: Dict[str, Tuple[int, bool, str]] = {
    "I": (0, False, "I"),
    "X": (1, True, "Y"),
    "Y": (0, False, "Y"),
    "Z": (0, True, "I"),
}


def outcome_pauli(k: int) -> PauliString:
    """What Bell outcome k leaves on the teleported state: the complex conjugate of Q_k."""
    return PauliString(BELL_LETTERS[k]).conjugate()


def outcome_parity(k: int) -> int:
    """ZZ parity of Bell state k."""
    return int(BELL_LETTERS[k] in "XY")


@dataclass(frozen=True)
class PauliFrame:
    letters: str
    phase: int = 0
    hadamards: Tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        if any(c not in LETTER_MATRICES for c in self.letters):
            raise ValidationError(f"invalid frame letters '{self.letters}'")
        object.__setattr__(self, "phase", self.phase % 8)
        if not self.hadamards:
            object.__setattr__(self, "hadamards", (False,) * len(self.letters))
        elif len(self.hadamards) != len(self.letters):
            raise DimensionError("one Hadamard flag per frame letter is required")
        object.__setattr__(self, "hadamards", tuple(bool(h) for h in self.hadamards))

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliFrame":
        return cls("I" * n_qubits)

    @classmethod
    def from_pauli(cls, p: PauliString) -> "PauliFrame":
        return cls(p.letters, 2 * p.phase)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def pending(self) -> bool:
        return any(self.hadamards)

    def matrix(self) -> np.ndarray:
        factors = [
            H @ LETTER_MATRICES[c] if h else LETTER_MATRICES[c] for c, h in zip(self.letters, self.hadamards)
        ]
        return OMEGA ** self.phase * kron(*factors)

    def key(self) -> Tuple[str, Tuple[bool, ...]]:
        """The frame up to its global phase."""
        return self.letters, self.hadamards

    def x_bit(self, t: int) -> int:
        """Whether the frame flips a computational-basis readout of qubit t."""
        if self.hadamards[t]:
            raise ValidationError(f"qubit {t} still has a pending Hadamard correction")
        return int(self.letters[t] in "XY")

    def _with(self, updates: Dict[int, str], extra_phase: int, hadamards: Sequence[bool] = None) -> "PauliFrame":
        letters = list(self.letters)
        for t, c in updates.items():
            letters[t] = c
        flags = self.hadamards if hadamards is None else tuple(hadamards)
        return PauliFrame("".join(letters), self.phase + extra_phase, flags)

    def left_multiply(self, p: PauliString, targets: Sequence[int]) -> "PauliFrame":
        """(p on targets) · F."""
        if p.n_qubits != len(targets):
            raise DimensionError(f"{p.n_qubits}-qubit string on {len(targets)} targets")
        power = p.phase
        updates = {}
        for c, t in zip(p.letters, targets):
            if self.hadamards[t]:
                raise ValidationError(f"qubit {t} still has a pending Hadamard correction")
            product = PauliString(c) * PauliString(self.letters[t])
            power += product.phase
            updates[t] = product.letters
        return self._with(updates, 2 * power)

    def settle(self, p: PauliString, target: int) -> "PauliFrame":
        """
        Teleportation through an H resource onto a qubit with a pending Hadamard: the new frame
        on the target is (H p H) · P and the pending flag is cleared.
        """
        if not self.hadamards[target]:
            raise ValidationError(f"qubit {target} has no pending Hadamard")
        power, letter = H_RULE[p.letters]
        flags = list(self.hadamards)
        flags[target] = False
        cleared = self._with({}, 0, flags)
        return cleared.left_multiply(PauliString(letter, p.phase + power), [target])


def frame_conjugate(frame: PauliFrame, gate: str, targets: Sequence[int]) -> Tuple[PauliFrame, bool]:
    """
    Push the frame through a gate: returns (F', correction_needed) with U F U† = F'.
    H and CNOT keep the frame Pauli; G may leave a pending Hadamard on its target.
    """
    targets = list(targets)
    if any(frame.hadamards[t] for t in targets):
        raise ValidationError(f"pending Hadamard on {targets} must be settled before {gate}")
    if gate == "H":
        (t,) = targets
        power, letter = H_RULE[frame.letters[t]]
        return frame._with({t: letter}, 2 * power), False
    if gate == "CNOT":
        c, t = targets
        if c == t:
            raise ValidationError("CNOT needs two distinct qubits")
        power, letters = CNOT_RULE[frame.letters[c] + frame.letters[t]]
        return frame._with({c: letters[0], t: letters[1]}, 2 * power), False
    if gate == "G":
        (t,) = targets
        power, correction, letter = G_RULE[frame.letters[t]]
        flags = list(frame.hadamards)
        flags[t] = correction
        return frame._with({t: letter}, 2 * power, flags), correction
    raise ValidationError(f"unknown gate '{gate}'")
