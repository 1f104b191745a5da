"""
Strategies for n CHSH games played one after another.

A device's reflection for round r may depend on its own local transcript h = ((q_0, o_0), ...,
(q_{r-1}, o_{r-1})) of questions and answers so far. Rounds are numbered from 0.

Exact evolutions keep one unnormalized vector per transcript instead of a density matrix: the
block for transcript h is Tr_C |v_h⟩⟨v_h|, so blocks are compared with gram_trace_distance
without ever forming the (dA·dB)² matrices.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np

from chshlab.chsh.game import CHSHStrategy, is_structured, projector, wins
from chshlab.config import config
from chshlab.errors import CapacityError, DimensionError, ValidationError
from chshlab.linalg.jordan import extended_operator
from chshlab.linalg.operators import (
    KET0, Z, apply_isometry, apply_local, as_reflection, as_state, check_dims, dagger, kron,
    gram_trace_distance, permute_factors, reduced_state,
)
from chshlab.schemas import SimulationReport

logger = logging.getLogger("chshlab.sequential.strategy")

LocalTranscript = Tuple[Tuple[int, int], ...]
FullTranscript = Tuple[Tuple[int, int, int, int], ...]  # (a, b, x, y) per round
Rule = Callable[[int, LocalTranscript, int], np.ndarray]

DEVICES = ("A", "B")


def alice_history(h: FullTranscript) -> LocalTranscript:
    return tuple((a, x) for a, _, x, _ in h)


def bob_history(h: FullTranscript) -> LocalTranscript:
    return tuple((b, y) for _, b, _, y in h)


def local_transcripts(rounds: int) -> List[LocalTranscript]:
    """Every local transcript of the given length."""
    steps = list(itertools.product((0, 1), repeat=2))
    return [tuple(h) for h in itertools.product(steps, repeat=rounds)]


@dataclass(frozen=True)
class SequentialStrategy:
    """Shared state on H_A ⊗ H_B ⊗ H_C and one reflection rule per device"""

    n: int
    dims: Tuple[int, int, int]
    psi: np.ndarray
    alice_rule: Rule
    bob_rule: Rule
    name: str = "strategy"
    _cache: Dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"need at least one game, got n={self.n}")
        psi = as_state(self.psi)
        dims = tuple(check_dims(self.dims, psi.size))
        if len(dims) != 3:
            raise DimensionError(f"expected dims (A, B, C), got {dims}")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "dims", dims)

    def device_dim(self, device: str) -> int:
        return self.dims[0] if device == "A" else self.dims[1]

    def reflection(self, device: str, r: int, h: LocalTranscript, question: int) -> np.ndarray:
        """The validated reflection the device uses in round r after local transcript h."""
        key = (device, r, tuple(h), question)
        if key not in self._cache:
            if not 0 <= r < self.n or len(h) != r:
                raise ValidationError(f"round {r} with a transcript of length {len(h)} is not reachable")
            rule = self.alice_rule if device == "A" else self.bob_rule
            op = as_reflection(rule(r, tuple(h), question), f"{self.name} {device} round {r}")
            d = self.device_dim(device)
            if op.shape != (d, d):
                raise DimensionError(f"{device}'s rule returned {op.shape}, device dim is {d}")
            self._cache[key] = op
        return self._cache[key]

    def pair(self, device: str, r: int, h: LocalTranscript) -> Tuple[np.ndarray, np.ndarray]:
        return self.reflection(device, r, h, 0), self.reflection(device, r, h, 1)

    def projector(self, device: str, r: int, h: LocalTranscript, question: int, answer: int) -> np.ndarray:
        return projector(self.reflection(device, r, h, question), answer)

    def conditional_game(self, h: FullTranscript, psi: np.ndarray) -> CHSHStrategy:
        """The single game played in round len(h) from the (normalized) state psi."""
        r = len(h)
        return CHSHStrategy(psi, self.dims, self.pair("A", r, alice_history(h)), self.pair("B", r, bob_history(h)))


@dataclass
class TranscriptState:
    """Unnormalized vectors keyed by transcript after j rounds; zero branches are kept"""

    j: int
    dims: Tuple[int, int, int]
    vectors: Dict[Hashable, np.ndarray]

    def probability(self, h: Hashable) -> float:
        v = self.vectors.get(h)
        return 0.0 if v is None else float(np.vdot(v, v).real)

    def probabilities(self) -> Dict[Hashable, float]:
        return {h: self.probability(h) for h in self.vectors}

    def total_trace(self) -> float:
        return sum(self.probabilities().values())

    def factor(self, h: Hashable) -> np.ndarray:
        """M with block(h) = M M†, shape (dA·dB, dC)."""
        d_ab = self.dims[0] * self.dims[1]
        v = self.vectors.get(h)
        if v is None:
            return np.zeros((d_ab, self.dims[2]), dtype=complex)
        return v.reshape(d_ab, self.dims[2])

    def block(self, h: Hashable) -> np.ndarray:
        """Sub-normalized state of A ⊗ B for transcript h, with C traced out."""
        return reduced_state(self.factor(h).reshape(-1), self.dims, [0, 1])

    def blocks(self) -> Dict[Hashable, np.ndarray]:
        return {h: self.block(h) for h in self.vectors}


def check_rounds(s: SequentialStrategy, upto: int) -> None:
    if upto < 0 or upto > s.n:
        raise ValidationError(f"cannot evolve {upto} rounds of a {s.n}-round strategy")
    if upto > config.evolve_cap:
        raise CapacityError(f"exact evolution is capped at {config.evolve_cap} rounds, asked for {upto}")


def initial_state(s: SequentialStrategy) -> TranscriptState:
    return TranscriptState(0, s.dims, {(): s.psi})


def joint_step(s: SequentialStrategy, state: TranscriptState) -> TranscriptState:
    """Both devices measure round state.j; questions are uniform, so each branch carries ½."""
    r = state.j
    out = {}
    for h, v in state.vectors.items():
        ha, hb = alice_history(h), bob_history(h)
        for a, x in itertools.product((0, 1), repeat=2):
            alice_part = apply_local(s.projector("A", r, ha, a, x), v, s.dims, [0])
            for b, y in itertools.product((0, 1), repeat=2):
                branch = apply_local(s.projector("B", r, hb, b, y), alice_part, s.dims, [1])
                out[h + ((a, b, x, y),)] = branch / 2
    return TranscriptState(r + 1, s.dims, out)


def device_step(s: SequentialStrategy, state: TranscriptState, device: str) -> TranscriptState:
    """Only `device` measures; the other device's register is left untouched."""
    r = state.j
    factor = 0 if device == "A" else 1
    out = {}
    for h, v in state.vectors.items():
        for q, o in itertools.product((0, 1), repeat=2):
            branch = apply_local(s.projector(device, r, h, q, o), v, s.dims, [factor])
            out[h + ((q, o),)] = branch / np.sqrt(2)
    return TranscriptState(r + 1, s.dims, out)


def evolve(s: SequentialStrategy, upto: Optional[int] = None) -> TranscriptState:
    """Exact joint evolution through `upto` rounds (default: all)."""
    upto = s.n if upto is None else upto
    check_rounds(s, upto)
    state = initial_state(s)
    for _ in range(upto):
        state = joint_step(s, state)
    logger.debug(f"🧮 evolved {s.name} through {upto} rounds, {len(state.vectors)} blocks")
    return state


def device_evolution(s: SequentialStrategy, device: str, upto: Optional[int] = None) -> TranscriptState:
    upto = s.n if upto is None else upto
    check_rounds(s, upto)
    state = initial_state(s)
    for _ in range(upto):
        state = device_step(s, state, device)
    return state


def structured_profile(s: SequentialStrategy, eps: float) -> List[float]:
    """For each round, the probability that the game played in that round is ε-structured."""
    check_rounds(s, s.n - 1)
    profile = []
    state = initial_state(s)
    for r in range(s.n):
        mass = 0.0
        for h, v in state.vectors.items():
            p = float(np.vdot(v, v).real)
            if p <= 1e-15:
                continue
            if is_structured(s.conditional_game(h, v / np.sqrt(p)), eps):
                mass += p
        profile.append(mass)
        if r + 1 < s.n:
            state = joint_step(s, state)
    return profile


def block_gap(rho: TranscriptState, sigma: TranscriptState) -> float:
    """Σ_h ‖ρ_h − σ_h‖₁ over the union of transcripts."""
    keys = set(rho.vectors) | set(sigma.vectors)
    return sum(gram_trace_distance(rho.factor(h), sigma.factor(h)) for h in keys)


def _check_comparable(s: SequentialStrategy, t: SequentialStrategy) -> None:
    if s.n != t.n:
        raise ValidationError(f"strategies play different numbers of games: {s.n} vs {t.n}")
    if s.dims != t.dims:
        raise DimensionError(f"strategies act on different spaces: {s.dims} vs {t.dims}")


def simulation_distance(s: SequentialStrategy, t: SequentialStrategy) -> SimulationReport:
    """
    Per-device gaps ‖E^D_{1,j}(ρ) − Ẽ^D_{1,j}(σ)‖₁ for j = 0..n, their maximum, and the weak
    gap between the joint evolutions.
    """
    _check_comparable(s, t)
    check_rounds(s, s.n)

    device_gaps: Dict[str, List[float]] = {}
    for device in DEVICES:
        rho, sigma = initial_state(s), initial_state(t)
        gaps = [block_gap(rho, sigma)]
        for _ in range(s.n):
            rho, sigma = device_step(s, rho, device), device_step(t, sigma, device)
            gaps.append(block_gap(rho, sigma))
        device_gaps[device] = gaps

    rho, sigma = initial_state(s), initial_state(t)
    weak = [block_gap(rho, sigma)]
    for _ in range(s.n):
        rho, sigma = joint_step(s, rho), joint_step(t, sigma)
        weak.append(block_gap(rho, sigma))

    report = SimulationReport(
        device_gaps=device_gaps,
        max_gap=max(max(g) for g in device_gaps.values()),
        weak_gaps=weak,
        weak_gap=max(weak),
    )
    logger.debug(f"📏 {s.name} vs {t.name}: max gap {report.max_gap:.3g}, weak gap {report.weak_gap:.3g}")
    return report


# --- Building strategies ---
def repeated_strategy(game: CHSHStrategy, n: int, name: str = "repeated") -> SequentialStrategy:
    """
    n independent copies of a single-game strategy; round r is played on copy r.

    Device A's space is H_A^{⊗n} with copy 0 as the most significant factor, likewise B and C.
    """
    da, db, dc = game.dims
    factor_dims = [da, db, dc] * n
    order = [3 * i for i in range(n)] + [3 * i + 1 for i in range(n)] + [3 * i + 2 for i in range(n)]
    psi = permute_factors(kron(*([game.psi] * n)), factor_dims, order)

    def slot_rule(ops: Tuple[np.ndarray, np.ndarray], d: int) -> Rule:
        def rule(r: int, h: LocalTranscript, question: int) -> np.ndarray:
            return kron(np.eye(d ** r), ops[question], np.eye(d ** (n - r - 1)))

        return rule

    return SequentialStrategy(
        n, (da ** n, db ** n, dc ** n), psi, slot_rule(game.alice, da), slot_rule(game.bob, db), name
    )


def extend_strategy(s: SequentialStrategy, va: np.ndarray, vb: np.ndarray, name: Optional[str] = None) -> SequentialStrategy:
    """
    Push a strategy through local isometries V_A, V_B.

    The state becomes (V_A ⊗ V_B ⊗ I)ψ and every reflection R becomes V R V† + (I − V V†).
    """
    for device, v in (("A", va), ("B", vb)):
        d = s.device_dim(device)
        if v.shape[1] != d or not np.allclose(dagger(v) @ v, np.eye(d), atol=config.validation_tol):
            raise ValidationError(f"V_{device} is not an isometry out of a {d}-dimensional space")
    psi = apply_isometry(va, s.psi, s.dims, 0)
    psi = apply_isometry(vb, psi, [va.shape[0], s.dims[1], s.dims[2]], 1)
    return SequentialStrategy(
        s.n,
        (va.shape[0], vb.shape[0], s.dims[2]),
        psi,
        lambda r, h, q: extended_operator(va, s.reflection("A", r, h, q)),
        lambda r, h, q: extended_operator(vb, s.reflection("B", r, h, q)),
        name or f"{s.name}+ext",
    )


def ancilla_isometry(d: int, count: int) -> np.ndarray:
    """|0…0⟩ ⊗ I_d: prepends `count` qubits in |0⟩."""
    zeros = kron(*([KET0] * count)).reshape(-1, 1) if count else np.ones((1, 1), dtype=complex)
    return np.kron(zeros, np.eye(d))


def ancilla_extension(s: SequentialStrategy, count: Optional[int] = None) -> SequentialStrategy:
    """Both devices get `count` (default n) fresh qubits in |0⟩ in front of their space."""
    count = s.n if count is None else count
    return extend_strategy(
        s, ancilla_isometry(s.dims[0], count), ancilla_isometry(s.dims[1], count), f"{s.name}+anc{count}"
    )


def double_strategy(s: SequentialStrategy) -> SequentialStrategy:
    """
    H_D → H_D ⊗ C² with the ancilla in |0⟩ and every reflection R replaced by R ⊗ Z.

    On the reachable states the behaviour is unchanged, while every one-dimensional Jordan
    line of a pair gains a partner of opposite signs, so no block needs padding.
    """
    column = KET0.reshape(2, 1)
    va = np.kron(np.eye(s.dims[0]), column)
    vb = np.kron(np.eye(s.dims[1]), column)
    psi = apply_isometry(va, s.psi, s.dims, 0)
    psi = apply_isometry(vb, psi, [2 * s.dims[0], s.dims[1], s.dims[2]], 1)
    return SequentialStrategy(
        s.n,
        (2 * s.dims[0], 2 * s.dims[1], s.dims[2]),
        psi,
        lambda r, h, q: kron(s.reflection("A", r, h, q), Z),
        lambda r, h, q: kron(s.reflection("B", r, h, q), Z),
        f"{s.name}+double",
    )


def conjugate_strategy(s: SequentialStrategy, ua: np.ndarray, ub: np.ndarray) -> SequentialStrategy:
    """Local change of basis: ψ → (U_A ⊗ U_B ⊗ I)ψ, R → U R U†."""
    psi = apply_local(ub, apply_local(ua, s.psi, s.dims, [0]), s.dims, [1])
    return SequentialStrategy(
        s.n,
        s.dims,
        psi,
        lambda r, h, q: ua @ s.reflection("A", r, h, q) @ dagger(ua),
        lambda r, h, q: ub @ s.reflection("B", r, h, q) @ dagger(ub),
        f"{s.name}+conj",
    )


# --- Transcript sampling ---
def transcript_probability(s: SequentialStrategy, h: FullTranscript) -> float:
    """Probability of one full transcript, following only its own branch."""
    v = s.psi
    for r, (a, b, x, y) in enumerate(h):
        v = apply_local(s.projector("A", r, alice_history(h[:r]), a, x), v, s.dims, [0])
        v = apply_local(s.projector("B", r, bob_history(h[:r]), b, y), v, s.dims, [1]) / 2
    return float(np.vdot(v, v).real)


def sample_transcript(s: SequentialStrategy, rng: np.random.Generator, rounds: Optional[int] = None) -> FullTranscript:
    """One run of the games with uniform questions and sequential Born-rule answers."""
    rounds = s.n if rounds is None else rounds
    if int(np.prod(s.dims)) > 2 ** config.dense_qubit_cap:
        raise CapacityError(f"state of dimension {int(np.prod(s.dims))} exceeds the dense cap")
    v = s.psi
    h: FullTranscript = ()
    for r in range(rounds):
        a, b = (int(q) for q in rng.integers(0, 2, size=2))
        ha, hb = alice_history(h), bob_history(h)
        branches = []
        for x, y in itertools.product((0, 1), repeat=2):
            w = apply_local(s.projector("A", r, ha, a, x), v, s.dims, [0])
            branches.append(((x, y), apply_local(s.projector("B", r, hb, b, y), w, s.dims, [1])))
        weights = np.array([np.vdot(w, w).real for _, w in branches])
        k = int(rng.choice(4, p=weights / weights.sum()))
        (x, y), w = branches[k]
        v = w / np.linalg.norm(w)
        h = h + ((a, b, x, y),)
    return h


def win_count(h: Sequence[Tuple[int, int, int, int]]) -> int:
    return sum(1 for a, b, x, y in h if wins(a, b, x, y))
