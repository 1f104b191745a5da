"""
Single-shot CHSH game.

Questions a (Alice) and b (Bob) are uniform bits; answers x, y are measurement outcomes, 0 for
the +1 eigenspace of the device's reflection. The provers win when x ⊕ y = a·b.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from chshlab.errors import DimensionError
from chshlab.linalg.operators import (
    EPR, G, H, X, Z, apply_local, as_reflection, as_state, check_dims, dagger, kron,
)

logger = logging.getLogger("chshlab.chsh.game")

COS2 = np.cos(np.pi / 8) ** 2
TSIRELSON = 2 * np.sqrt(2)

Outcome = Tuple[int, int, int, int]


@dataclass(frozen=True)
class CHSHStrategy:
    """Shared pure state on H_A ⊗ H_B ⊗ H_C plus one reflection per question and device"""

    psi: np.ndarray
    dims: Tuple[int, int, int]
    alice: Tuple[np.ndarray, np.ndarray]
    bob: Tuple[np.ndarray, np.ndarray]

    def __post_init__(self) -> None:
        psi = as_state(self.psi)
        dims = tuple(check_dims(self.dims, psi.size))
        if len(dims) != 3:
            raise DimensionError(f"expected dims (A, B, C), got {dims}")
        alice = tuple(as_reflection(r, f"Alice R{i}") for i, r in enumerate(self.alice))
        bob = tuple(as_reflection(r, f"Bob R{i}") for i, r in enumerate(self.bob))
        for name, ops, d in (("Alice", alice, dims[0]), ("Bob", bob, dims[1])):
            if len(ops) != 2 or any(op.shape != (d, d) for op in ops):
                raise DimensionError(f"{name}'s reflections must be two {d}x{d} matrices")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alice", alice)
        object.__setattr__(self, "bob", bob)

    def device(self, which: str) -> Tuple[np.ndarray, np.ndarray]:
        return self.alice if which == "A" else self.bob

    def with_bob(self, r0: np.ndarray, r1: np.ndarray) -> "CHSHStrategy":
        return CHSHStrategy(self.psi, self.dims, self.alice, (r0, r1))


def projector(r: np.ndarray, answer: int) -> np.ndarray:
    """½(I + (−1)^answer R)."""
    return (np.eye(r.shape[0]) + (-1) ** answer * r) / 2


def wins(a: int, b: int, x: int, y: int) -> bool:
    return (x ^ y) == (a & b)


# --- Preset strategies ---
BOB_IDEAL = (dagger(G) @ X @ G, dagger(G) @ Z @ G)


def ideal_chsh_strategy() -> CHSHStrategy:
    """EPR pair; Alice measures Z, X; Bob measures G†XG, G†ZG."""
    return CHSHStrategy(EPR, (2, 2, 1), (Z, X), BOB_IDEAL)


def classical_strategy() -> CHSHStrategy:
    """Both devices always answer 0: the deterministic optimum, winning 3/4 of the time."""
    one = np.ones((1, 1), dtype=complex)
    return CHSHStrategy(np.ones(1, dtype=complex), (1, 1, 1), (one, one), (one, one))


def y_rotation(phi: float) -> np.ndarray:
    return np.array(
        [[np.cos(phi / 2), -np.sin(phi / 2)], [np.sin(phi / 2), np.cos(phi / 2)]], dtype=complex
    )


def rotated_bob_strategy(phi: float, both: bool = False) -> CHSHStrategy:
    """Ideal strategy with Bob's second (or both) reflections rotated by phi about the y axis."""
    u = y_rotation(phi)
    r0, r1 = BOB_IDEAL
    r1 = u @ r1 @ dagger(u)
    if both:
        r0 = u @ r0 @ dagger(u)
    return ideal_chsh_strategy().with_bob(r0, r1)


def anti_ideal_strategy() -> CHSHStrategy:
    r0, r1 = BOB_IDEAL
    return ideal_chsh_strategy().with_bob(-r0, -r1)


def product_strategy(blocks: Dict[int, float]) -> CHSHStrategy:
    """
    Ideal copies tagged by a shared classical flag: Σ_k √w_k |ψ*⟩|k⟩_A|k⟩_B.

    Each device's reflections are the ideal ones on its qubit, tensored with the identity on
    its flag register.
    """
    k = len(blocks)
    weights = np.array([blocks[i] for i in sorted(blocks)], dtype=float)
    weights = weights / weights.sum()
    psi = np.zeros((2, k, 2, k), dtype=complex)
    for i, w in enumerate(weights):
        psi[:, i, :, i] = np.sqrt(w) * EPR.reshape(2, 2)
    flag = np.eye(k)
    return CHSHStrategy(
        psi.reshape(-1),
        (2 * k, 2 * k, 1),
        (kron(Z, flag), kron(X, flag)),
        (kron(BOB_IDEAL[0], flag), kron(BOB_IDEAL[1], flag)),
    )


# --- Statistics ---
def branch_state(s: CHSHStrategy, a: int, b: int, x: int, y: int) -> np.ndarray:
    """(P^A(a, x) ⊗ P^B(b, y) ⊗ I) ψ, unnormalized."""
    out = apply_local(projector(s.alice[a], x), s.psi, s.dims, [0])
    return apply_local(projector(s.bob[b], y), out, s.dims, [1])


def outcome_distribution(s: CHSHStrategy) -> Dict[Outcome, float]:
    """Joint probability of (a, b, x, y) with uniform questions."""
    dist = {}
    for a, b, x, y in itertools.product((0, 1), repeat=4):
        branch = branch_state(s, a, b, x, y)
        dist[(a, b, x, y)] = 0.25 * float(np.vdot(branch, branch).real)
    return dist


def correlation_value(s: CHSHStrategy) -> float:
    """⟨ψ| Σ_{a,b} (−1)^{ab} R^A_a ⊗ R^B_b |ψ⟩."""
    total = 0.0
    for a, b in itertools.product((0, 1), repeat=2):
        moved = apply_local(s.bob[b], apply_local(s.alice[a], s.psi, s.dims, [0]), s.dims, [1])
        total += (-1) ** (a * b) * np.vdot(s.psi, moved).real
    return float(total)


def win_probability(s: CHSHStrategy) -> float:
    return sum(p for (a, b, x, y), p in outcome_distribution(s).items() if wins(a, b, x, y))


def conditional_win_probabilities(s: CHSHStrategy) -> Dict[Tuple[int, int, int], float]:
    """Pr[win | a, b, x] for every (a, b, x) with Pr[x | a, b] > 0."""
    dist = outcome_distribution(s)
    out = {}
    for a, b, x in itertools.product((0, 1), repeat=3):
        mass = dist[(a, b, x, 0)] + dist[(a, b, x, 1)]
        if mass > 1e-15:
            out[(a, b, x)] = sum(dist[(a, b, x, y)] for y in (0, 1) if wins(a, b, x, y)) / mass
    return out


def is_structured(s: CHSHStrategy, eps: float) -> bool:
    return correlation_value(s) >= TSIRELSON - eps


def min_outcome_probability(s: CHSHStrategy) -> float:
    return min(outcome_distribution(s).values())


# --- Outcome-relating unitaries ---
def outcome_unitary(a: int, a_prime: int, delta: int) -> np.ndarray:
    """
    U(a, a', Δ) with U e(a', x') = e(a, x' ⊕ Δ) for Alice's ideal eigenvectors e(a, x).
    """
    flip_outcome = X if a_prime == 0 else Z
    base = np.eye(2, dtype=complex) if a == a_prime else H
    return base @ np.linalg.matrix_power(flip_outcome, delta)


def normalized_branch(s: CHSHStrategy, a: int, x: int, b: int, y: int) -> np.ndarray:
    branch = branch_state(s, a, b, x, y)
    norm = np.linalg.norm(branch)
    return branch / norm if norm > 0 else branch
