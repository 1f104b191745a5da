"""
Extended CHSH game with nine Bloch directions per device.

Alice and Bob each receive one of the directions x, y, z, ±xy, ±xz, ±yz and measure along it.
Three embedded CHSH sub-games (in the xz, yz and xy planes) pin down the ideal operators;
Alice's y operator is then fixed up to a hidden reflection Δ on her ancilla, because the
provers may coherently use −Y instead of Y.
"""

import itertools
import logging
from dataclasses import dataclass, replace
from typing import Dict, Tuple

import numpy as np
from scipy.linalg import polar

from chshlab.chsh.game import CHSHStrategy
from chshlab.chsh.rigidity import TARGET, jordan_frames, residual_vector, rigidity_analyze
from chshlab.errors import ValidationError
from chshlab.linalg.bounds import hermitian_to_reflection, round_to_reflection
from chshlab.linalg.jordan import extended_operator, jordan_decompose, jordan_isometry
from chshlab.linalg.operators import (
    EPR, G, H, X, Y, Z, apply_local, as_reflection, as_state, check_dims, dagger, kron,
)
from chshlab.schemas import ExtendedRigidityReport

logger = logging.getLogger("chshlab.chsh.extended")

_R = 1 / np.sqrt(2)
DIRECTIONS: Dict[str, Tuple[float, float, float]] = {
    "x": (1.0, 0.0, 0.0),
    "y": (0.0, 1.0, 0.0),
    "z": (0.0, 0.0, 1.0),
    "+xy": (_R, _R, 0.0),
    "-xy": (_R, -_R, 0.0),
    "+xz": (_R, 0.0, _R),
    "-xz": (_R, 0.0, -_R),
    "+yz": (0.0, _R, _R),
    "-yz": (0.0, _R, -_R),
}

# sub-game -> ((Alice a=0, a=1), (Bob b=0, b=1)), each entry (direction, sign)
SUBGAMES = {
    "xz": ((("z", 1), ("x", 1)), (("+xz", 1), ("-xz", -1))),
    "yz": ((("z", 1), ("y", 1)), (("-yz", -1), ("+yz", 1))),
    "xy": ((("x", 1), ("y", -1)), (("+xy", 1), ("-xy", 1))),
}

BOB_PHYSICAL = dagger(G) @ H  # maps Bob's xz Jordan frame back to the computational frame


def bloch_reflection(v: Tuple[float, float, float]) -> np.ndarray:
    return v[0] * X + v[1] * Y + v[2] * Z


@dataclass(frozen=True)
class ExtendedStrategy:
    psi: np.ndarray
    dims: Tuple[int, int, int]
    alice: Dict[str, np.ndarray]
    bob: Dict[str, np.ndarray]

    def __post_init__(self) -> None:
        psi = as_state(self.psi)
        check_dims(self.dims, psi.size)
        for name, ops in (("Alice", self.alice), ("Bob", self.bob)):
            missing = set(DIRECTIONS) - set(ops)
            if missing:
                raise ValidationError(f"{name} has no reflection for {sorted(missing)}")
            for direction, r in ops.items():
                as_reflection(r, f"{name} {direction}")
        object.__setattr__(self, "psi", psi)

    def with_reflection(self, device: str, direction: str, r: np.ndarray) -> "ExtendedStrategy":
        alice, bob = dict(self.alice), dict(self.bob)
        (alice if device == "A" else bob)[direction] = r
        return ExtendedStrategy(self.psi, self.dims, alice, bob)


def ideal_extended_strategy() -> ExtendedStrategy:
    ops = {name: bloch_reflection(v) for name, v in DIRECTIONS.items()}
    return ExtendedStrategy(EPR, (2, 2, 1), ops, dict(ops))


def conjugated_extended_strategy() -> ExtendedStrategy:
    """Both devices use −Y in place of Y; indistinguishable from the ideal strategy."""
    ops = {name: bloch_reflection(v).conj() for name, v in DIRECTIONS.items()}
    return ExtendedStrategy(EPR, (2, 2, 1), ops, dict(ops))


def extended_distribution(s: ExtendedStrategy) -> Dict[Tuple[str, str, int, int], float]:
    """p̃(x, y | a, b) for every direction pair."""
    dist = {}
    for a, b in itertools.product(DIRECTIONS, repeat=2):
        for x, y in itertools.product((0, 1), repeat=2):
            pa = (np.eye(s.dims[0]) + (-1) ** x * s.alice[a]) / 2
            pb = (np.eye(s.dims[1]) + (-1) ** y * s.bob[b]) / 2
            branch = apply_local(pb, apply_local(pa, s.psi, s.dims, [0]), s.dims, [1])
            dist[(a, b, x, y)] = float(np.vdot(branch, branch).real)
    return dist


_IDEAL_DISTRIBUTION: Dict[Tuple[str, str, int, int], float] = {}


def ideal_distribution() -> Dict[Tuple[str, str, int, int], float]:
    if not _IDEAL_DISTRIBUTION:
        _IDEAL_DISTRIBUTION.update(extended_distribution(ideal_extended_strategy()))
    return _IDEAL_DISTRIBUTION


def extended_structured_gap(s: ExtendedStrategy) -> float:
    """max over (a, b, x, y) of |p̃ − p|."""
    ideal = ideal_distribution()
    return max(abs(p - ideal[key]) for key, p in extended_distribution(s).items())


def subgame_strategy(s: ExtendedStrategy, name: str) -> CHSHStrategy:
    alice_spec, bob_spec = SUBGAMES[name]
    alice = tuple(sign * s.alice[d] for d, sign in alice_spec)
    bob = tuple(sign * s.bob[d] for d, sign in bob_spec)
    return CHSHStrategy(s.psi, s.dims, alice, bob)


def _hidden_unitary(s: ExtendedStrategy, wa: np.ndarray) -> np.ndarray:
    """
    U = U0† U1 where Ū = W_yz W_xz† = |0⟩⟨0| ⊗ U0 + |1⟩⟨1| ⊗ U1 relates Alice's two Jordan frames.
    """
    w_yz = jordan_isometry(jordan_decompose(s.alice["z"], s.alice["y"]))
    u_bar = w_yz @ dagger(wa)
    k1 = wa.shape[0] // 2
    k2 = w_yz.shape[0] // 2
    u0 = np.zeros((k1, k1), dtype=complex)
    u1 = np.zeros((k1, k1), dtype=complex)
    k = min(k1, k2)
    u0[:k, :] = u_bar[:k, :k1]
    u1[:k, :] = u_bar[k2:k2 + k, k1:]
    u, _ = polar(dagger(u0) @ u1)
    return u


def extended_rigidity_metrics(s: ExtendedStrategy) -> ExtendedRigidityReport:
    reports = {name: rigidity_analyze(subgame_strategy(s, name)) for name in SUBGAMES}
    degenerate = [name for name, r in reports.items() if r.correlation <= 2]
    if degenerate:
        logger.warning(f"⚠️ sub-games {degenerate} have correlation ≤ 2; residuals are not meaningful")

    frames = jordan_frames(subgame_strategy(s, "xz"))
    _, _, _, kb, dc = frames.dims
    psi = frames.psi
    wa, wb = frames.alice_isometry, frames.bob_isometry

    # Alice: Δ from the Hermitian part of iU
    u = _hidden_unitary(s, wa)
    hermitian = 1j * (u - dagger(u)) / 2
    delta = round_to_reflection(hermitian)
    alice_y = extended_operator(wa, s.alice["y"])
    alice_y_residual = np.linalg.norm(
        frames.apply_alice(alice_y, psi) - frames.apply_alice(kron(Y, delta), psi)
    )

    rounding_residual = 0.0
    cross = residual_vector(frames, TARGET)
    if np.linalg.norm(cross) > 1e-12:
        rest = np.eye(kb * dc)
        _, rounding_residual = hermitian_to_reflection(
            kron(hermitian, rest), cross / np.linalg.norm(cross), kron(1j * u, rest)
        )

    # Bob: move his xz Jordan frame back to the computational frame
    wb_phys = kron(BOB_PHYSICAL, np.eye(kb)) @ wb
    psi_hat = frames.apply_bob(kron(BOB_PHYSICAL, np.eye(kb)), psi)
    residuals = {}
    for direction, ideal_op in (("x", X), ("z", Z)):
        moved = frames.apply_bob(extended_operator(wb_phys, s.bob[direction]), psi_hat)
        residuals[direction] = np.linalg.norm(moved - frames.apply_qubit(ideal_op, psi_hat, "B"))
    bob_y = extended_operator(wb_phys, s.bob["y"])
    off_diagonal = bob_y[:kb, kb:]
    delta_b = round_to_reflection(1j * (off_diagonal - dagger(off_diagonal)) / 2)
    bob_y_residual = np.linalg.norm(
        frames.apply_bob(bob_y, psi_hat) - frames.apply_bob(kron(Y, delta_b), psi_hat)
    )

    # ψ× against the EPR pair, and the hidden-sign agreement ⟨ψ×|Δ ⊗ Δ'|ψ×⟩
    cross = residual_vector(replace(frames, psi=psi_hat), EPR)
    norm = np.linalg.norm(cross)
    state_residual = float(np.sqrt(max(0.0, 2 - 2 * norm)))
    overlap = 0.0
    if norm > 1e-12:
        unit = cross / norm
        signs = kron(delta, delta_b, np.eye(dc))
        overlap = float(np.vdot(unit, signs @ unit).real)

    return ExtendedRigidityReport(
        structured_gap=extended_structured_gap(s),
        subgames=reports,
        degenerate=degenerate,
        alice_x_residual=reports["xz"].alice_x_residual,
        alice_y_residual=float(alice_y_residual),
        bob_x_residual=float(residuals["x"]),
        bob_z_residual=float(residuals["z"]),
        bob_y_residual=float(bob_y_residual),
        state_residual=state_residual,
        delta_overlap=overlap,
        rounding_residual=float(rounding_residual),
    )
