"""
Named sequential strategies and samplers: the honest one and a handful of cheaters.

Each factory takes the game count first; `adversary(kind, n, **params)` dispatches by name.
"""

import logging
from typing import Callable, Dict, Union

import numpy as np

from chshlab.chsh.game import BOB_IDEAL, CHSHStrategy, ideal_chsh_strategy, rotated_bob_strategy
from chshlab.errors import ValidationError
from chshlab.linalg.operators import EPR, I2, X, Y, Z, kron
from chshlab.sequential.samplers import AdaptiveSampler, GameSampler
from chshlab.sequential.strategy import LocalTranscript, SequentialStrategy, repeated_strategy

logger = logging.getLogger("chshlab.sequential.adversaries")


def honest_strategy(n: int) -> SequentialStrategy:
    """n EPR pairs; round r is the ideal game on pair r."""
    return repeated_strategy(ideal_chsh_strategy(), n, "honest")


def classical_strategy(n: int) -> SequentialStrategy:
    """Both devices always answer 0, winning exactly 3/4 of the games."""
    one = np.ones((1, 1), dtype=complex)
    return SequentialStrategy(n, (1, 1, 1), np.ones(1, dtype=complex), lambda r, h, q: one, lambda r, h, q: one, "classical")


def depolarized_game(p: float) -> CHSHStrategy:
    """
    The ideal game on (1 − p)|EPR⟩⟨EPR| + p·I/4, purified into a four-level register C.
    """
    if not 0 <= p <= 1:
        raise ValidationError(f"depolarizing probability must lie in [0, 1], got {p}")
    weights = [1 - 3 * p / 4, p / 4, p / 4, p / 4]
    bells = [kron(I2, op) @ EPR for op in (I2, X, Z, Y)]
    psi = sum(np.sqrt(w) * np.kron(bell, np.eye(4)[k]) for k, (w, bell) in enumerate(zip(weights, bells)))
    return CHSHStrategy(psi, (2, 2, 4), (Z, X), BOB_IDEAL)


def depolarized_strategy(n: int, p: float = 0.1) -> SequentialStrategy:
    return repeated_strategy(depolarized_game(p), n, f"depolarized({p})")


def rotated_strategy(n: int, phi: float = 0.1) -> SequentialStrategy:
    """Bob's second reflection rotated by φ about the y axis in every round."""
    return repeated_strategy(rotated_bob_strategy(phi), n, f"rotated({phi})")


def _shifted(ops, n: int, shift: Callable[[int], int]) -> Callable[[int, LocalTranscript, int], np.ndarray]:
    def rule(r: int, h: LocalTranscript, question: int) -> np.ndarray:
        slot = shift(r)
        return kron(np.eye(2 ** slot), ops[question], np.eye(2 ** (n - slot - 1)))

    return rule


def qubit_shift_strategy(n: int) -> SequentialStrategy:
    """Both devices cyclically shift their EPR halves by one: round r is played on pair r + 1."""
    honest = honest_strategy(n)

    def shift(r: int) -> int:
        return (r + 1) % n

    return SequentialStrategy(
        n, honest.dims, honest.psi, _shifted((Z, X), n, shift), _shifted(BOB_IDEAL, n, shift), "qubit_shift"
    )


def adaptive_sampler(n: int) -> GameSampler:
    """
    Honest until the first lost game, then classical. A loss depends on both devices' questions
    and answers, so the switch needs a side channel between them and cannot be written as a
    SequentialStrategy; `n` is accepted for a uniform factory signature.
    """
    return AdaptiveSampler()


def local_adaptive_strategy(n: int) -> SequentialStrategy:
    """
    The closest non-communicating version: each device plays honestly until its own transcript
    contains answer 1 to question 1, then always answers 0.
    """
    honest = honest_strategy(n)
    identity = np.eye(2 ** n, dtype=complex)

    def rule(device: str) -> Callable[[int, LocalTranscript, int], np.ndarray]:
        def reflection(r: int, h: LocalTranscript, question: int) -> np.ndarray:
            if (1, 1) in h:
                return identity
            return honest.reflection(device, r, h, question)

        return reflection

    return SequentialStrategy(n, honest.dims, honest.psi, rule("A"), rule("B"), "local_adaptive")


Adversary = Union[SequentialStrategy, GameSampler]

ADVERSARIES: Dict[str, Callable[..., Adversary]] = {
    "honest": honest_strategy,
    "classical": classical_strategy,
    "depolarized": depolarized_strategy,
    "rotated": rotated_strategy,
    "qubit_shift": qubit_shift_strategy,
    "adaptive": adaptive_sampler,
    "local_adaptive": local_adaptive_strategy,
}


def adversary(kind: str, n: int, **params) -> Adversary:
    if kind not in ADVERSARIES:
        raise ValidationError(f"unknown strategy '{kind}', choose from {sorted(ADVERSARIES)}")
    logger.debug(f"🎭 building {kind} strategy for {n} games {params or ''}")
    return ADVERSARIES[kind](n, **params)
