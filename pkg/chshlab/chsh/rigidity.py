"""
Rigidity analysis of a single CHSH strategy.

Each device's reflection pair is split into Jordan blocks and mapped through the block
isometry W: H_D → C² ⊗ C^k, where R^D_0 becomes Z ⊗ I and R^D_1 becomes Σ_b flip(θ_b) ⊗ |b⟩⟨b|.
In these frames the ideal strategy is Alice (Z, X), Bob (Z, X) on the state
τ = (I ⊗ HG)|ψ*⟩, and every residual below is measured against that target.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from chshlab.chsh.game import TSIRELSON, CHSHStrategy, correlation_value
from chshlab.linalg.jordan import JordanBlock, extended_reflections, jordan_decompose, jordan_isometry
from chshlab.linalg.operators import EPR, G, H, X, Z, apply_isometry, apply_local, kron
from chshlab.schemas import BlockSummary, RigidityReport

logger = logging.getLogger("chshlab.chsh.rigidity")

# Bob's ideal reflections written in his Jordan frame
BOB_FRAME = H @ G
TARGET = kron(np.eye(2), BOB_FRAME) @ EPR


@dataclass
class JordanFrames:
    """The strategy moved into both devices' Jordan frames"""

    psi: np.ndarray  # on (qA, kA, qB, kB, C)
    dims: List[int]
    alice_blocks: List[JordanBlock]
    bob_blocks: List[JordanBlock]
    alice_ops: Tuple[np.ndarray, np.ndarray]  # on qA ⊗ kA
    bob_ops: Tuple[np.ndarray, np.ndarray]
    alice_isometry: np.ndarray
    bob_isometry: np.ndarray

    def apply_alice(self, op: np.ndarray, vec: np.ndarray) -> np.ndarray:
        return apply_local(op, vec, self.dims, [0, 1])

    def apply_bob(self, op: np.ndarray, vec: np.ndarray) -> np.ndarray:
        return apply_local(op, vec, self.dims, [2, 3])

    def apply_qubit(self, op: np.ndarray, vec: np.ndarray, device: str) -> np.ndarray:
        return apply_local(op, vec, self.dims, [0 if device == "A" else 2])


def jordan_frames(s: CHSHStrategy) -> JordanFrames:
    alice_blocks = jordan_decompose(*s.alice)
    bob_blocks = jordan_decompose(*s.bob)
    wa = jordan_isometry(alice_blocks)
    wb = jordan_isometry(bob_blocks)
    ka, kb = len(alice_blocks), len(bob_blocks)
    dims_in = list(s.dims)
    psi = apply_isometry(wa, s.psi, dims_in, 0)
    dims_mid = [2 * ka, dims_in[1], dims_in[2]]
    psi = apply_isometry(wb, psi, dims_mid, 1)
    return JordanFrames(
        psi=psi,
        dims=[2, ka, 2, kb, dims_in[2]],
        alice_blocks=alice_blocks,
        bob_blocks=bob_blocks,
        alice_ops=extended_reflections(alice_blocks),
        bob_ops=extended_reflections(bob_blocks),
        alice_isometry=wa,
        bob_isometry=wb,
    )


def _block_summaries(blocks: List[JordanBlock], psi: np.ndarray, dims: List[int], factor: int) -> List[BlockSummary]:
    out = []
    for block in blocks:
        weight = np.linalg.norm(apply_isometry(block.projector(), psi, dims, factor)) ** 2
        out.append(BlockSummary(theta=block.theta, weight=float(weight), padded=block.padded))
    return out


def m_residual(frames: JordanFrames) -> float:
    """‖M₀ψ‖² + ‖M₁ψ‖² with M₀ = ½(A0 + A1) − B0/√2 and M₁ = ½(A0 − A1) − B1/√2."""
    a0, a1 = frames.alice_ops
    b0, b1 = frames.bob_ops
    psi = frames.psi
    total = 0.0
    for sign, bob_op in ((1, b0), (-1, b1)):
        alice_part = frames.apply_alice((a0 + sign * a1) / 2, psi)
        vec = alice_part - frames.apply_bob(bob_op, psi) / np.sqrt(2)
        total += np.vdot(vec, vec).real
    return float(total)


def extended_correlation(frames: JordanFrames) -> float:
    psi = frames.psi
    total = 0.0
    for a, alice_op in enumerate(frames.alice_ops):
        for b, bob_op in enumerate(frames.bob_ops):
            moved = frames.apply_bob(bob_op, frames.apply_alice(alice_op, psi))
            total += (-1) ** (a * b) * np.vdot(psi, moved).real
    return float(total)


def x_residual(frames: JordanFrames, device: str) -> float:
    """‖(R̃^D_1 − X ⊗ I) ψ̃‖ on the device's Jordan qubit."""
    psi = frames.psi
    if device == "A":
        vec = frames.apply_alice(frames.alice_ops[1], psi) - frames.apply_qubit(X, psi, "A")
    else:
        vec = frames.apply_bob(frames.bob_ops[1], psi) - frames.apply_qubit(X, psi, "B")
    return float(np.linalg.norm(vec))


def residual_vector(frames: JordanFrames, target: np.ndarray = TARGET) -> np.ndarray:
    """(⟨target| ⊗ I) ψ̃ on (kA, kB, C)."""
    qa, ka, qb, kb, dc = frames.dims
    t = frames.psi.reshape(qa, ka, qb, kb, dc)
    return np.einsum("ab,aibjc->ijc", target.reshape(2, 2).conj(), t).reshape(-1)


def state_residual(frames: JordanFrames, target: np.ndarray = TARGET) -> float:
    """min over unit ψ× of ‖ψ̃ − target ⊗ ψ×‖ = √(2 − 2‖(⟨target| ⊗ I)ψ̃‖)."""
    overlap = np.linalg.norm(residual_vector(frames, target))
    return float(np.sqrt(max(0.0, 2 - 2 * overlap)))


def pull_over_operator(alpha: int) -> np.ndarray:
    """(Z + (−1)^α X)/√2, the other device's ideal operator matching R^D_α on the target."""
    return (Z + (-1) ** alpha * X) / np.sqrt(2)


def pull_over_residual(s: CHSHStrategy, device: str, alpha: int) -> float:
    """‖(R̃^D_α − O_α on the other device's Jordan qubit) ψ̃‖."""
    frames = jordan_frames(s)
    return _pull_over(frames, device, alpha)


def _pull_over(frames: JordanFrames, device: str, alpha: int) -> float:
    psi = frames.psi
    other = "B" if device == "A" else "A"
    if device == "A":
        moved = frames.apply_alice(frames.alice_ops[alpha], psi)
    else:
        moved = frames.apply_bob(frames.bob_ops[alpha], psi)
    return float(np.linalg.norm(moved - frames.apply_qubit(pull_over_operator(alpha), psi, other)))


def rigidity_analyze(s: CHSHStrategy) -> RigidityReport:
    correlation = correlation_value(s)
    frames = jordan_frames(s)
    padded = any(b.padded for b in frames.alice_blocks + frames.bob_blocks)
    report = RigidityReport(
        correlation=correlation,
        epsilon=max(0.0, TSIRELSON - correlation),
        m_residual=m_residual(frames),
        extended_correlation=extended_correlation(frames),
        alice_x_residual=x_residual(frames, "A"),
        bob_x_residual=x_residual(frames, "B"),
        state_residual=state_residual(frames),
        alice_blocks=_block_summaries(frames.alice_blocks, s.psi, list(s.dims), 0),
        bob_blocks=_block_summaries(frames.bob_blocks, s.psi, list(s.dims), 1),
        padded=padded,
    )
    if padded:
        logger.debug("🧩 strategy needed padded Jordan blocks")
    logger.debug(f"📐 correlation={correlation:.6f} ε={report.epsilon:.3g} m={report.m_residual:.3g}")
    return report
