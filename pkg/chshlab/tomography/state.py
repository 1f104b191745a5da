# state.py

"""
State tomography protocol.

Eve shares m EPR pairs between Alice and Bob. Alice gets a random question A_j for every pair
and measures Z (A_j = 0) or X (A_j = 1) on her half. Bob is sent σ, qn distinct pair indices,
q at a time, and returns one outcome O_j ∈ [2^q] per chunk. The estimators

    τ^{o,P} = 2^{q+|P|}/n · Σ_j δ(O_j, o) Π_{i: P_i ≠ I} δ(basis of pair σ_{j,i}, P_i) (−1)^{X_{σ_{j,i}}}

compare Bob's outcomes with the Pauli statistics Alice's answers imply; honest provers give
τ^{o,P} ≈ Tr(π^o P).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from chshlab.errors import DeviceViolation, DimensionError, ValidationError
from chshlab.linalg.operators import X, Z, kron
from chshlab.linalg.pauli import PauliString
from chshlab.linalg.register import QubitRegister, epr_register, reflection_projector
from chshlab.rng import stream
from chshlab.schemas import TauRecord, TomographyRecord, TomographyVerdict
from chshlab.tomography.xz import XZBasisSet, xz_strings

logger = logging.getLogger("chshlab.tomography.state")

# question 0 -> Z, question 1 -> X
ALICE_BASES = (Z, X)
ALICE_LETTERS = "ZX"


@dataclass(frozen=True, eq=False)
class ProductBasis:
    """Tensor product of slot bases; slot 0 holds the most significant outcome digits"""

    slots: Tuple[XZBasisSet, ...]

    def __post_init__(self) -> None:
        if not self.slots:
            raise ValidationError("a product basis needs at least one slot")

    @property
    def q(self) -> int:
        return sum(s.q for s in self.slots)

    def ranges(self) -> List[range]:
        out, start = [], 0
        for s in self.slots:
            out.append(range(start, start + s.q))
            start += s.q
        return out

    def split(self, o: int) -> Tuple[int, ...]:
        digits = []
        for s in reversed(self.slots):
            digits.append(o % len(s))
            o //= len(s)
        return tuple(reversed(digits))

    def merge(self, digits: Sequence[int]) -> int:
        o = 0
        for s, d in zip(self.slots, digits):
            o = o * len(s) + int(d)
        return o


def as_product(basis: Union[XZBasisSet, ProductBasis]) -> ProductBasis:
    return basis if isinstance(basis, ProductBasis) else ProductBasis((basis,))


# --- Devices ---
class StateAlice:
    """Alice's device: one answer bit per question"""

    def start(self, m: int, rng: np.random.Generator) -> None:
        pass

    def answer(self, j: int, question: int, register: QubitRegister, rng: np.random.Generator) -> int:
        raise NotImplementedError


class IdealStateAlice(StateAlice):
    def answer(self, j, question, register, rng):
        return register.measure_reflections([("A", j)], [ALICE_BASES[question]], rng)[0]


class ShuffledAnswersAlice(StateAlice):
    """Measures in the asked basis, but on pair π(j) for a secret permutation π"""

    def start(self, m, rng):
        self._perm = rng.permutation(m)

    def answer(self, j, question, register, rng):
        return register.measure_reflections([("A", int(self._perm[j]))], [ALICE_BASES[question]], rng)[0]


class StateBob:
    """Bob's device: one outcome in [2^q] per chunk of σ"""

    def start(self, n: int, q: int, rng: np.random.Generator) -> None:
        pass

    def report(self, j: int, chunk: Tuple[int, ...], register: QubitRegister, rng: np.random.Generator) -> int:
        raise NotImplementedError


class HonestStateBob(StateBob):
    """Measures the chunk in a fixed basis, slot by slot for product bases"""

    def __init__(self, basis: Union[XZBasisSet, ProductBasis]):
        self.basis = as_product(basis)
        self._projectors = [s.projectors() for s in self.basis.slots]

    def report(self, j, chunk, register, rng):
        digits = []
        for positions, projectors in zip(self.basis.ranges(), self._projectors):
            labels = [("B", chunk[i]) for i in positions]
            digits.append(register.measure(labels, projectors, rng))
        return self.basis.merge(digits)


class ConstantOutcomeBob(StateBob):
    def __init__(self, outcome: int = 1):
        self.outcome = outcome

    def report(self, j, chunk, register, rng):
        return self.outcome


class NoisyStateBob(HonestStateBob):
    """Honest, but with probability p replaces the outcome by a uniform one"""

    def __init__(self, basis: Union[XZBasisSet, ProductBasis], p: float):
        if not 0 <= p <= 1:
            raise ValidationError(f"noise probability must lie in [0, 1], got {p}")
        super().__init__(basis)
        self.p = p

    def report(self, j, chunk, register, rng):
        o = super().report(j, chunk, register, rng)
        if rng.random() < self.p:
            return int(rng.integers(2 ** self.basis.q))
        return o


def checked_bit(value, who: str, j: int) -> int:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)) or value not in (0, 1):
        raise DeviceViolation(f"{who} answered {value!r} in round {j}, expected a bit")
    return int(value)


def _checked_outcome(value, q: int, j: int) -> int:
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)) or not 0 <= value < 2 ** q:
        raise DeviceViolation(f"Bob reported {value!r} in round {j}, expected an outcome in [0, {2 ** q})")
    return int(value)


# --- Runs ---
@dataclass(frozen=True, eq=False)
class StateTomographyRun:
    """Complete transcript of one state tomography run"""

    q: int
    n: int
    m: int
    sigma: np.ndarray
    alice_questions: np.ndarray
    alice_answers: np.ndarray
    bob_outcomes: np.ndarray

    def __post_init__(self) -> None:
        if self.sigma.shape != (self.q * self.n,):
            raise DimensionError(f"σ has shape {self.sigma.shape}, expected ({self.q * self.n},)")
        if len(set(self.sigma.tolist())) != self.sigma.size or self.sigma.min() < 0 or self.sigma.max() >= self.m:
            raise ValidationError(f"σ must list {self.q * self.n} distinct indices in [0, {self.m})")
        if self.alice_questions.shape != (self.m,) or self.alice_answers.shape != (self.m,):
            raise DimensionError(f"Alice's transcript must have {self.m} rounds")
        if self.bob_outcomes.shape != (self.n,):
            raise DimensionError(f"Bob's transcript must have {self.n} rounds")

    def chunk(self, j: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in self.sigma[j * self.q:(j + 1) * self.q])

    def records(self) -> List[TomographyRecord]:
        out = [
            TomographyRecord(round=j, recipient="A", question=str(int(a)), answer=str(int(x)))
            for j, (a, x) in enumerate(zip(self.alice_questions, self.alice_answers))
        ]
        out += [
            TomographyRecord(
                round=j, recipient="B", question=",".join(map(str, self.chunk(j))), answer=str(int(o))
            )
            for j, o in enumerate(self.bob_outcomes)
        ]
        return out


def run_state_tomography(
    alice: StateAlice,
    bob: StateBob,
    q: int,
    n: int,
    m: Optional[int] = None,
    seed: int = 0,
    register: Optional[QubitRegister] = None,
) -> StateTomographyRun:
    """Simulate one run: Alice's m rounds first, then Bob's n rounds on the chunks of σ."""
    m = q * n if m is None else m
    if q < 1 or n < 1:
        raise ValidationError(f"state tomography needs q ≥ 1 and n ≥ 1, got q={q}, n={n}")
    if m < q * n:
        raise ValidationError(f"m = {m} pairs cannot hold σ of length qn = {q * n}")
    referee = stream(seed, "tomography/state/referee")
    devices = stream(seed, "tomography/state/devices")
    sigma = referee.choice(m, size=q * n, replace=False)
    questions = referee.integers(0, 2, size=m)
    register = epr_register(range(m)) if register is None else register

    alice.start(m, devices)
    bob.start(n, q, devices)
    answers = np.array([
        checked_bit(alice.answer(j, int(questions[j]), register, devices), "Alice", j) for j in range(m)
    ])
    outcomes = np.array([
        _checked_outcome(bob.report(j, tuple(int(i) for i in sigma[j * q:(j + 1) * q]), register, devices), q, j)
        for j in range(n)
    ])
    logger.debug(f"📋 state tomography run q={q} n={n} m={m} seed={seed}")
    return StateTomographyRun(q, n, m, sigma, questions, answers, outcomes)


# --- Estimators ---
@dataclass(frozen=True, eq=False)
class EstimatorTable:
    """Outcome counts N^o and estimators τ^{o,P}, P over xz_strings(q)"""

    q: int
    n: int
    counts: np.ndarray
    tau: np.ndarray
    strings: Tuple[PauliString, ...]

    def value(self, o: int, p: Union[PauliString, str]) -> float:
        letters = p.letters if isinstance(p, PauliString) else p
        return float(self.tau[o, [s.letters for s in self.strings].index(letters)])

    def records(self) -> List[TauRecord]:
        return [
            TauRecord(o=o, pauli=p.letters, tau=float(self.tau[o, k]))
            for o in range(self.tau.shape[0])
            for k, p in enumerate(self.strings)
        ]


def compute_estimators(run: StateTomographyRun) -> EstimatorTable:
    q, n = run.q, run.n
    positions = run.sigma.reshape(n, q)
    letters = np.array(list(ALICE_LETTERS))[run.alice_questions[positions]]
    signs = 1 - 2 * run.alice_answers[positions]
    strings = tuple(xz_strings(q))

    indicators = np.ones((n, len(strings)))
    for k, p in enumerate(strings):
        for i, c in enumerate(p.letters):
            if c != "I":
                indicators[:, k] *= (letters[:, i] == c) * signs[:, i]
    onehot = np.zeros((n, 2 ** q))
    onehot[np.arange(n), run.bob_outcomes] = 1
    scale = np.array([2.0 ** (q + p.weight) for p in strings]) / n
    tau = (onehot.T @ indicators) * scale
    return EstimatorTable(q, n, onehot.sum(axis=0).astype(int), tau, strings)


def ideal_table(basis: XZBasisSet) -> np.ndarray:
    """Tr(π^o P) for every outcome and every string of xz_strings(q)."""
    return np.array([[basis.coordinate(o, p) for p in xz_strings(basis.q)] for o in range(len(basis))])


def state_tomography_verdict(est: EstimatorTable, basis: XZBasisSet) -> TomographyVerdict:
    q, n = est.q, est.n
    if basis.q != q:
        raise DimensionError(f"estimators are for {q} qubits, basis has {basis.q}")
    count_gap = float(np.max(np.abs(est.counts - n / 2 ** q)))
    count_threshold = 4 ** q * math.sqrt(n * math.log(n)) if n > 1 else 0.0
    tau_gap = float(np.max(np.abs(est.tau - ideal_table(basis))))
    tau_threshold = 4 ** q * math.sqrt(math.log(n) / n)
    accepted = count_gap <= count_threshold and tau_gap <= tau_threshold
    return TomographyVerdict(
        kind="state",
        accepted=accepted,
        count_gap=count_gap,
        count_threshold=count_threshold,
        tau_gap=tau_gap,
        tau_threshold=tau_threshold,
    )


def accept_state_tomography(est: EstimatorTable, basis: XZBasisSet, n: Optional[int] = None) -> bool:
    if n is not None and n != est.n:
        raise ValidationError(f"estimators were computed from {est.n} rounds, not {n}")
    verdict = state_tomography_verdict(est, basis)
    logger.info(
        f"{'✅' if verdict.accepted else '❌'} state tomography: count gap {verdict.count_gap:.1f}"
        f" / {verdict.count_threshold:.1f}, tau gap {verdict.tau_gap:.3f} / {verdict.tau_threshold:.3f}"
    )
    return verdict.accepted


# --- Product bases ---
def slot_run(run: StateTomographyRun, basis: ProductBasis, s: int) -> StateTomographyRun:
    """The run restricted to slot s: its positions of every chunk and its outcome digit."""
    if basis.q != run.q:
        raise DimensionError(f"product basis acts on {basis.q} qubits, run on {run.q}")
    positions = run.sigma.reshape(run.n, run.q)[:, list(basis.ranges()[s])]
    digits = np.array([basis.split(int(o))[s] for o in run.bob_outcomes])
    return StateTomographyRun(
        basis.slots[s].q, run.n, run.m, positions.reshape(-1), run.alice_questions, run.alice_answers, digits
    )


def product_tomography_verdict(run: StateTomographyRun, basis: ProductBasis) -> TomographyVerdict:
    """Accept iff every slot passes both criteria; gaps are reported for the worst slot."""
    verdicts = [
        state_tomography_verdict(compute_estimators(slot_run(run, basis, s)), slot)
        for s, slot in enumerate(basis.slots)
    ]

    def badness(v: TomographyVerdict) -> float:
        return max(v.count_gap / max(v.count_threshold, 1e-300), v.tau_gap / v.tau_threshold)

    worst = max(verdicts, key=badness)
    return worst.model_copy(update={"kind": "state-per-slot", "accepted": all(v.accepted for v in verdicts)})


# --- Exact expectations ---
def ideal_tau_expectation(basis: XZBasisSet, o: int, p: PauliString) -> float:
    """
    Exact E[τ^{o,P}] for honest provers measuring `basis`, by enumerating Alice's bases and
    answers against Bob's outcome o on q maximally entangled pairs.
    """
    q = basis.q
    if p.n_qubits != q:
        raise DimensionError(f"{p.n_qubits}-qubit string for a {q}-qubit basis")
    dim = 2 ** q
    phi = np.eye(dim, dtype=complex).reshape(-1) / math.sqrt(dim)
    bob = basis.projector(o)
    total = 0.0
    for bases in itertools.product((0, 1), repeat=q):
        for answers in itertools.product((0, 1), repeat=q):
            indicator = 1
            for c, b, x in zip(p.letters, bases, answers):
                if c != "I":
                    indicator *= (ALICE_LETTERS[b] == c) * (-1) ** x
            if indicator == 0:
                continue
            alice = kron(*(reflection_projector(ALICE_BASES[b], x) for b, x in zip(bases, answers)))
            branch = kron(alice, bob) @ phi
            total += indicator * float(np.vdot(branch, branch).real) / 2 ** q
    return 2 ** (q + p.weight) * total
