"""
Jordan decomposition of a pair of reflections.

The space splits into mutually orthogonal one- and two-dimensional subspaces invariant under
both reflections. In a two-dimensional block with basis (e0, e1) the first reflection acts as
Z and the second as cos(2θ) Z + sin(2θ) X, θ in [0, π/2].

The blocks are found by compressing R1 onto the +1 eigenspace of R0: every eigenvector e0
of that compression with eigenvalue c = cos(2θ) spans a block together with
e1 = (R1 e0 − c e0) / sin(2θ). One-dimensional blocks are paired into two-dimensional ones
where the signs allow it; the rest are padded with an ancilla direction.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from chshlab.config import config
from chshlab.errors import DimensionError
from chshlab.linalg.operators import Z, as_reflection, dagger, flip

logger = logging.getLogger("chshlab.linalg.jordan")


@dataclass(frozen=True)
class JordanBlock:
    """One invariant subspace of a reflection pair"""

    basis: np.ndarray  # d x 2, or d x 1 when padded
    theta: float
    padded: bool = False
    slot: int = 0  # for padded blocks: which qubit basis vector the column stands for

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    def restricted(self, which: int) -> np.ndarray:
        """Action of R0 (which=0) or R1 (which=1) in the block's qubit frame."""
        return Z if which == 0 else flip(self.theta)

    def embedded(self, which: int) -> np.ndarray:
        """The block's contribution to R0 or R1 on the original space."""
        op = self.restricted(which)
        if not self.padded:
            return self.basis @ op @ dagger(self.basis)
        sign = op[self.slot, self.slot].real
        return sign * self.projector()

    def qubit_columns(self) -> List[Tuple[int, np.ndarray]]:
        if self.padded:
            return [(self.slot, self.basis[:, 0])]
        return [(0, self.basis[:, 0]), (1, self.basis[:, 1])]


def _fix_phase(v: np.ndarray) -> complex:
    """Phase that makes the largest-magnitude entry of v real positive."""
    k = int(np.argmax(np.abs(v)))
    return np.conj(v[k]) / abs(v[k])


def jordan_decompose(r0: np.ndarray, r1: np.ndarray, tol: Optional[float] = None) -> List[JordanBlock]:
    tol = config.jordan_tol if tol is None else tol
    r0 = as_reflection(r0, "R0")
    r1 = as_reflection(r1, "R1")
    if r0.shape != r1.shape:
        raise DimensionError(f"reflections act on different spaces: {r0.shape} vs {r1.shape}")

    evals, evecs = np.linalg.eigh(r0)
    v_plus = evecs[:, evals > 0]
    v_minus = evecs[:, evals <= 0]

    blocks: List[JordanBlock] = []
    # one-dimensional invariant lines keyed by (sign of R0, sign of R1)
    lines = {(1, 1): [], (1, -1): [], (-1, 1): [], (-1, -1): []}
    partners: List[np.ndarray] = []

    if v_plus.shape[1]:
        compressed = dagger(v_plus) @ r1 @ v_plus
        cvals, cvecs = np.linalg.eigh((compressed + dagger(compressed)) / 2)
        for c, w in zip(cvals, cvecs.T):
            e0 = v_plus @ w
            e0 = e0 * _fix_phase(e0)
            residual = r1 @ e0 - c * e0
            s = np.linalg.norm(residual)
            if s > tol:
                e1 = residual / s
                theta = float(np.arccos(np.clip(c, -1.0, 1.0)) / 2)
                blocks.append(JordanBlock(np.column_stack([e0, e1]), theta))
                partners.append(e1)
            else:
                lines[(1, 1 if c > 0 else -1)].append(e0)

    if v_minus.shape[1]:
        if partners:
            kernel = null_space(dagger(np.column_stack(partners)) @ v_minus, rcond=tol)
            rest = v_minus @ kernel
        else:
            rest = v_minus
        if rest.shape[1]:
            compressed = dagger(rest) @ r1 @ rest
            svals, svecs = np.linalg.eigh((compressed + dagger(compressed)) / 2)
            for sval, w in zip(svals, svecs.T):
                v = rest @ w
                lines[(-1, 1 if sval > 0 else -1)].append(v * _fix_phase(v))

    # pair (+,+) with (-,-) at θ = 0 and (+,-) with (-,+) at θ = π/2
    for plus_key, minus_key, theta in (((1, 1), (-1, -1), 0.0), ((1, -1), (-1, 1), np.pi / 2)):
        while lines[plus_key] and lines[minus_key]:
            e0 = lines[plus_key].pop(0)
            e1 = lines[minus_key].pop(0)
            blocks.append(JordanBlock(np.column_stack([e0, e1]), theta))

    for (s0, s1), vectors in lines.items():
        for v in vectors:
            theta = 0.0 if s0 == s1 else np.pi / 2
            slot = 0 if s0 == 1 else 1
            blocks.append(JordanBlock(v.reshape(-1, 1), theta, padded=True, slot=slot))

    padded = sum(1 for b in blocks if b.padded)
    if padded:
        logger.debug(f"🧩 {padded} one-dimensional block(s) padded with ancilla directions")
    return blocks


def reconstruct(blocks: Sequence[JordanBlock], which: int) -> np.ndarray:
    """Rebuild R0 or R1 from its blocks."""
    return sum(b.embedded(which) for b in blocks)


def block_angles(blocks: Sequence[JordanBlock]) -> List[float]:
    return [b.theta for b in blocks]


def jordan_isometry(blocks: Sequence[JordanBlock]) -> np.ndarray:
    """
    Isometry W from the device space into C^2 ⊗ C^k, k = number of blocks.

    Row index is bit * k + block. W intertwines each input reflection with its extended form:
    W R0 = (Z ⊗ I) W and W R1 = R̃1 W.
    """
    k = len(blocks)
    dim = blocks[0].basis.shape[0]
    w = np.zeros((2 * k, dim), dtype=complex)
    for b, block in enumerate(blocks):
        for bit, column in block.qubit_columns():
            w[bit * k + b, :] = column.conj()
    return w


def extended_reflections(blocks: Sequence[JordanBlock]) -> Tuple[np.ndarray, np.ndarray]:
    """(Z ⊗ I, Σ_b flip(θ_b) ⊗ |b⟩⟨b|) on C^2 ⊗ C^k."""
    k = len(blocks)
    r0 = np.kron(Z, np.eye(k))
    r1 = np.zeros((2 * k, 2 * k), dtype=complex)
    for b, block in enumerate(blocks):
        marker = np.zeros((k, k))
        marker[b, b] = 1
        r1 += np.kron(flip(block.theta), marker)
    return r0, r1


def extended_operator(v: np.ndarray, r: np.ndarray) -> np.ndarray:
    """V R V† + (I − V V†): extends a reflection through an isometry V."""
    vv = v @ dagger(v)
    return v @ r @ dagger(v) + np.eye(v.shape[0]) - vv

