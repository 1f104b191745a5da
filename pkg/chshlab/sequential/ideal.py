"""
From a structured sequential strategy to an ideal one.

Three steps, each producing a strategy that the caller compares with the previous one through
simulation_distance:

1. make_single_qubit_ideal: in every game, replace the second reflection by the ideal one on
   the game's Jordan qubit, so each reflection pair becomes unitarily equivalent to (Z, X).
2. make_multi_qubit_ideal: prepend n ancillas and, after every game, swap the measured qubit
   out to its own ancilla, so the qubits of successive games sit in tensor product.
3. glue_to_ideal: follow one transcript through the multi-qubit frames and use those frames
   for every transcript, with EPR pairs placed in the exposed positions.

In a device's Jordan frame both ideal reflections are (Z, X), Bob's included, and the ideal
shared state of a game is the rigidity target (I ⊗ HG)|EPR⟩.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from chshlab.chsh.game import outcome_distribution, ideal_chsh_strategy
from chshlab.chsh.rigidity import BOB_FRAME, TARGET
from chshlab.errors import StrategyError, ValidationError
from chshlab.linalg.jordan import jordan_decompose, jordan_isometry
from chshlab.linalg.operators import (
    H, KET0, SWAP, X, Z, apply_local, dagger, embed, kron,
)
from chshlab.rng import stream
from chshlab.sequential.strategy import (
    DEVICES, FullTranscript, LocalTranscript, SequentialStrategy, TranscriptState,
    alice_history, ancilla_extension, bob_history, double_strategy, initial_state,
    local_transcripts, sample_transcript, transcript_probability, check_rounds,
)

logger = logging.getLogger("chshlab.sequential.ideal")

SIGMA = (Z, X)
# V(a, x)|0⟩ = e(a, x), the ideal eigenvector for question a and answer x
EIGENVECTOR_PREP = {
    (0, 0): np.eye(2, dtype=complex),
    (0, 1): X,
    (1, 0): H,
    (1, 1): H @ X,
}
FrameMap = Callable[[str, int, LocalTranscript], np.ndarray]


def ideal_eigenvector(question: int, answer: int) -> np.ndarray:
    return EIGENVECTOR_PREP[(question, answer)] @ KET0


# --- Game frames ---
def game_frame(s: SequentialStrategy, device: str, r: int, h: LocalTranscript) -> np.ndarray:
    """
    Unitary Jordan frame of the device's pair in round r: H_D → C² ⊗ C^k, qubit first.

    Raises StrategyError when a one-dimensional block would need padding.
    """
    key = ("frame", device, r, tuple(h))
    if key not in s._cache:
        blocks = jordan_decompose(*s.pair(device, r, h))
        if any(b.padded for b in blocks):
            raise StrategyError(f"{device}'s pair in round {r} after {h} has an unpaired Jordan line")
        s._cache[key] = jordan_isometry(blocks)
    return s._cache[key]


def needs_padding(s: SequentialStrategy) -> bool:
    """True when some reachable pair has a one-dimensional Jordan block without a partner."""
    for device in DEVICES:
        for r in range(s.n):
            for h in local_transcripts(r):
                if any(b.padded for b in jordan_decompose(*s.pair(device, r, h))):
                    return True
    return False


def is_single_qubit_ideal(s: SequentialStrategy, tol: float = 1e-9) -> bool:
    """Every reachable pair anticommutes, hence equals W†(Z ⊗ I)W, W†(X ⊗ I)W in its frame."""
    for device in DEVICES:
        for r in range(s.n):
            for h in local_transcripts(r):
                r0, r1 = s.pair(device, r, h)
                if not np.allclose(r0 @ r1 + r1 @ r0, 0, atol=tol):
                    return False
    return True


def make_single_qubit_ideal(s: SequentialStrategy) -> SequentialStrategy:
    """
    Keep every first reflection and replace the second by W†(X ⊗ I)W on the game's qubit.

    When some pair has an unpaired one-dimensional block the strategy is first doubled
    (see double_strategy); the result then acts on the doubled spaces, and the caller compares
    it with double_strategy(s).
    """
    if needs_padding(s):
        logger.info(f"🧩 {s.name} has unpaired Jordan lines, doubling the device spaces")
        s = double_strategy(s)
    base = s

    def rule(device: str) -> Callable[[int, LocalTranscript, int], np.ndarray]:
        def reflection(r: int, h: LocalTranscript, question: int) -> np.ndarray:
            if question == 0:
                return base.reflection(device, r, h, 0)
            w = game_frame(base, device, r, h)
            k = w.shape[0] // 2
            return dagger(w) @ kron(X, np.eye(k)) @ w

        return reflection

    return SequentialStrategy(base.n, base.dims, base.psi, rule("A"), rule("B"), f"{base.name}/single")


# --- Multi-qubit ideal strategies ---
@dataclass(frozen=True)
class MultiQubitStrategy(SequentialStrategy):
    """
    Strategy whose round-r reflections are F_r(h)† (σ_q on qubit r) F_r(h).

    Device spaces are (C²)^{⊗n} ⊗ H'_D; `frame(device, r, h)` returns F_r(h).
    """

    frame: Optional[FrameMap] = None


def multi_qubit_strategy(
    n: int, dims: Tuple[int, int, int], psi: np.ndarray, frame: FrameMap, name: str = "multi"
) -> MultiQubitStrategy:
    """Build the reflections from a frame map; the frames must be unitaries on each device."""
    for device, d in zip(DEVICES, dims[:2]):
        if d % (2 ** n):
            raise ValidationError(f"{device}'s dimension {d} has no room for {n} game qubits")

    def rule(device: str) -> Callable[[int, LocalTranscript, int], np.ndarray]:
        d = dims[0] if device == "A" else dims[1]
        rest = d // 2 ** n

        def reflection(r: int, h: LocalTranscript, question: int) -> np.ndarray:
            f = frame(device, r, h)
            exposed = kron(np.eye(2 ** r), SIGMA[question], np.eye(2 ** (n - r - 1) * rest))
            return dagger(f) @ exposed @ f

        return reflection

    return MultiQubitStrategy(n, dims, psi, rule("A"), rule("B"), name, frame=frame)


def make_multi_qubit_ideal(s: SequentialStrategy) -> MultiQubitStrategy:
    """
    Prepend n ancillas per device and expose each game's qubit on its own ancilla.

    With Jordan frames W_r(h) and the Jordan qubit at position n (after the ancillas),
        U_0 = S_0 W_0,  U_r(h) = S_r W_r(h) W_{r-1}(h')† V(a, x)_n   (h = h' + ((a, x),)),
    where S_r swaps positions n and r. The round-r frame is F_r(h) = U_r(h) ⋯ U_0.
    """
    if not is_single_qubit_ideal(s):
        raise ValidationError(f"{s.name} is not single-qubit ideal: some reflection pair does not anticommute")
    n = s.n
    extended = ancilla_extension(s, n)

    @lru_cache(maxsize=None)
    def swap(device: str, r: int) -> np.ndarray:
        k = s.device_dim(device) // 2
        return embed(SWAP, [2] * (n + 1) + [k], [r, n])

    @lru_cache(maxsize=None)
    def frame(device: str, r: int, h: LocalTranscript) -> np.ndarray:
        d = s.device_dim(device)
        lift = np.eye(2 ** n)
        step = swap(device, r) @ kron(lift, game_frame(s, device, r, h))
        if r == 0:
            return step
        (a, x) = h[-1]
        previous = game_frame(s, device, r - 1, h[:-1])
        prep = kron(lift, EIGENVECTOR_PREP[(a, x)], np.eye(d // 2))
        step = step @ kron(lift, dagger(previous)) @ prep
        return step @ frame(device, r - 1, h[:-1])

    return multi_qubit_strategy(n, extended.dims, extended.psi, frame, f"{s.name}/multi")


# --- Gluing ---
def _project_targets(psi: np.ndarray, n: int, dims: Tuple[int, int, int]) -> np.ndarray:
    """(⟨τ|^{⊗n} ⊗ I)ψ where τ sits on (A qubit r, B qubit r) for r < n; result on (A', B', C)."""
    ra, rb = dims[0] // 2 ** n, dims[1] // 2 ** n
    t = psi.reshape([2] * n + [ra] + [2] * n + [rb] + [dims[2]])
    pairs = [axis for r in range(n) for axis in (r, n + 1 + r)]
    t = np.transpose(t, pairs + [n, 2 * n + 1, 2 * n + 2]).reshape(4 ** n, -1)
    targets = kron(*([TARGET] * n))
    return (targets.conj() @ t).reshape(-1)


def _place_targets(rest: np.ndarray, n: int, dims: Tuple[int, int, int]) -> np.ndarray:
    """τ^{⊗n} ⊗ ψ' laid out as (A qubits, A', B qubits, B', C)."""
    ra, rb = dims[0] // 2 ** n, dims[1] // 2 ** n
    full = np.multiply.outer(kron(*([TARGET] * n)).reshape([2, 2] * n), rest.reshape(ra, rb, dims[2]))
    order = [2 * r for r in range(n)] + [2 * n] + [2 * r + 1 for r in range(n)] + [2 * n + 1, 2 * n + 2]
    return np.transpose(full, order).reshape(-1)


def choose_target(s: SequentialStrategy, seed: int = 0) -> FullTranscript:
    """A transcript drawn from the strategy's own distribution."""
    return sample_transcript(s, stream(seed, "glue/target"))


def glue_to_ideal(s: MultiQubitStrategy, target: Optional[FullTranscript] = None, seed: int = 0) -> SequentialStrategy:
    """
    Ideal strategy using the qubits that transcript `target` exposes in s.

    With M = F_A ⊗ F_B ⊗ I for the target's last-round frames, the new state is
    M†(τ^{⊗n} ⊗ ψ') for ψ' ∝ (⟨τ|^{⊗n} ⊗ I)Mψ, and every reflection is the transcript
    independent F† (σ_q on qubit r) F.
    """
    if not isinstance(s, MultiQubitStrategy) or s.frame is None:
        raise ValidationError("gluing needs a multi-qubit ideal strategy with its frames")
    n = s.n
    target = choose_target(s, seed) if target is None else tuple(target)
    if len(target) != n:
        raise ValidationError(f"target has {len(target)} rounds, strategy plays {n}")
    probability = transcript_probability(s, target)
    if probability <= 1e-12:
        raise StrategyError(f"target transcript {target} has probability {probability:.3g}")

    fa = s.frame("A", n - 1, alice_history(target)[: n - 1])
    fb = s.frame("B", n - 1, bob_history(target)[: n - 1])
    moved = apply_local(fb, apply_local(fa, s.psi, s.dims, [0]), s.dims, [1])
    rest = _project_targets(moved, n, s.dims)
    norm = np.linalg.norm(rest)
    if norm <= 1e-12:
        raise StrategyError("the exposed qubits have no overlap with the ideal pairs")
    glued = _place_targets(rest / norm, n, s.dims)
    psi = apply_local(dagger(fb), apply_local(dagger(fa), glued, s.dims, [0]), s.dims, [1])

    frames = {"A": fa, "B": fb}
    logger.info(f"🧷 glued {s.name} along {target} (probability {probability:.3g}, overlap {norm:.3g})")
    return multi_qubit_strategy(n, s.dims, psi, lambda device, r, h: frames[device], f"{s.name}/glued")


def ideal_pipeline(s: SequentialStrategy, target: Optional[FullTranscript] = None, seed: int = 0) -> SequentialStrategy:
    return glue_to_ideal(make_multi_qubit_ideal(make_single_qubit_ideal(s)), target, seed)


def pipeline_reference(s: SequentialStrategy) -> SequentialStrategy:
    """The extension of s that the pipeline's output acts on."""
    base = double_strategy(s) if needs_padding(s) else s
    return ancilla_extension(base, base.n)


# --- Guess-and-correct evolution ---
_IDEAL = outcome_distribution(ideal_chsh_strategy())


def _ideal_conditional(a: int, x: int) -> Dict[Tuple[int, int], float]:
    """Pr[(b, y) | (a, x)] in the ideal game."""
    mass = sum(_IDEAL[(a, b, x, y)] for b, y in itertools.product((0, 1), repeat=2))
    return {(b, y): _IDEAL[(a, b, x, y)] / mass for b, y in itertools.product((0, 1), repeat=2)}


def correction_unitary(a: int, b: int, delta: int) -> np.ndarray:
    """
    Σ_x |e(b, x ⊕ Δ)⟩⟨HG e(a, x)| in Bob's Jordan frame: maps the half collapsed by Alice's
    answer x to Bob's ideal eigenvector for answer x ⊕ Δ.
    """
    out = np.zeros((2, 2), dtype=complex)
    for x in (0, 1):
        out += np.outer(ideal_eigenvector(b, x ^ delta), (BOB_FRAME @ ideal_eigenvector(a, x)).conj())
    return out


def guess_evolution(s: SequentialStrategy, upto: Optional[int] = None) -> TranscriptState:
    """
    Alice measures; Bob's answer is guessed from the ideal conditional distribution and his
    game qubit is corrected with W†(V(a, b, x ⊕ y) ⊗ I)W instead of being measured.
    """
    upto = s.n if upto is None else upto
    check_rounds(s, upto)
    state = initial_state(s)
    for r in range(upto):
        out = {}
        for h, v in state.vectors.items():
            ha, hb = alice_history(h), bob_history(h)
            w = game_frame(s, "B", r, hb)
            k = w.shape[0] // 2
            for a, x in itertools.product((0, 1), repeat=2):
                measured = apply_local(s.projector("A", r, ha, a, x), v, s.dims, [0]) / np.sqrt(2)
                for (b, y), p in _ideal_conditional(a, x).items():
                    fix = dagger(w) @ kron(correction_unitary(a, b, x ^ y), np.eye(k)) @ w
                    out[h + ((a, b, x, y),)] = np.sqrt(p) * apply_local(fix, measured, s.dims, [1])
        state = TranscriptState(r + 1, s.dims, out)
    return state
