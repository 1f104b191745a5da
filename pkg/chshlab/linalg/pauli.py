# pauli.py

"""
Signed Pauli strings.

A PauliString is i^phase times a tensor product of letters from I, X, Y, Z. Products are
computed letter-wise from the cyclic table XY = iZ, YZ = iX, ZX = iY.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from chshlab.errors import DimensionError, ValidationError
from chshlab.linalg.operators import I2, X, Y, Z, dagger, kron

LETTERS = "IXYZ"
LETTER_MATRICES: Dict[str, np.ndarray] = {"I": I2, "X": X, "Y": Y, "Z": Z}

# (a, b) -> (phase power of i, letter) for the single-qubit product a*b
_PRODUCT: Dict[Tuple[str, str], Tuple[int, str]] = {}
for _a in LETTERS:
    _PRODUCT[("I", _a)] = (0, _a)
    _PRODUCT[(_a, "I")] = (0, _a)
    _PRODUCT[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1, _c)
    _PRODUCT[(_b, _a)] = (3, _c)

PHASES = {0: 1, 1: 1j, 2: -1, 3: -1j}


@dataclass(frozen=True)
class PauliString:
    """i^phase times a tensor product of Pauli letters"""

    letters: str
    phase: int = 0

    def __post_init__(self) -> None:
        if not self.letters or any(c not in LETTERS for c in self.letters):
            raise ValidationError(f"invalid Pauli letters '{self.letters}'")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as 'XZ', '-XZ', 'iY', '-iZZ'."""
        phase = 0
        body = label.strip()
        if body.startswith("-"):
            phase += 2
            body = body[1:]
        elif body.startswith("+"):
            body = body[1:]
        if body.startswith("i"):
            phase += 1
            body = body[1:]
        return cls(body, phase)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls("I" * n_qubits)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(1 for c in self.letters if c != "I")

    @property
    def coefficient(self) -> complex:
        return PHASES[self.phase]

    @property
    def is_hermitian(self) -> bool:
        return self.phase in (0, 2)

    def matrix(self) -> np.ndarray:
        return self.coefficient * kron(*(LETTER_MATRICES[c] for c in self.letters))

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise DimensionError(f"cannot multiply {self.n_qubits}- and {other.n_qubits}-qubit strings")
        phase = self.phase + other.phase
        letters = []
        for a, b in zip(self.letters, other.letters):
            p, c = _PRODUCT[(a, b)]
            phase += p
            letters.append(c)
        return PauliString("".join(letters), phase)

    def commutes_with(self, other: "PauliString") -> bool:
        clashes = sum(
            1 for a, b in zip(self.letters, other.letters) if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def unsigned(self) -> "PauliString":
        return PauliString(self.letters)

    def conjugate(self) -> "PauliString":
        """Entry-wise complex conjugate: each Y contributes a sign, i flips to -i."""
        phase = (-self.phase) % 4
        phase += 2 * self.letters.count("Y")
        return PauliString(self.letters, phase)

    def restrict(self, positions) -> "PauliString":
        return PauliString("".join(self.letters[p] for p in positions))

    def __str__(self) -> str:
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        return f"{prefix}{self.letters}"


def all_strings(n_qubits: int, alphabet: str = LETTERS) -> Iterator[PauliString]:
    for letters in itertools.product(alphabet, repeat=n_qubits):
        yield PauliString("".join(letters))


def identify_pauli(m: np.ndarray, tol: float = 1e-9) -> Optional[PauliString]:
    """Return the PauliString equal to `m` (phase in {±1, ±i}), or None when `m` is not one."""
    dim = m.shape[0]
    n = int(round(np.log2(dim)))
    if 2 ** n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    for p in all_strings(n):
        overlap = np.trace(dagger(p.matrix()) @ m) / dim
        if abs(abs(overlap) - 1) < tol:
            for phase, coefficient in PHASES.items():
                if abs(overlap - coefficient) < tol:
                    return PauliString(p.letters, phase)
            return None
    return None


def conjugate_by(p: PauliString, u: np.ndarray) -> Optional[PauliString]:
    """U P U† as a PauliString, or None when U does not map P into the Pauli group."""
    return identify_pauli(u @ p.matrix() @ dagger(u))
