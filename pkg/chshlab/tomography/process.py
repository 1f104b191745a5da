# process.py

"""
Process tomography protocol.

Roles are swapped relative to state tomography: Alice is sent σ, rn distinct pair indices,
r at a time, and returns one syndrome bit per generator of an XZ stabilizer set R; Bob gets
a random question B_j for every pair and measures X (B_j = 0) or Z (B_j = 1). A round is
checked for every generator whose sign Bob's bases determine.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from chshlab.errors import DeviceViolation, DimensionError, ValidationError
from chshlab.linalg.operators import G, X, Z, dagger
from chshlab.linalg.register import QubitRegister, epr_register
from chshlab.rng import stream
from chshlab.schemas import TomographyRecord, TomographyVerdict
from chshlab.tomography.state import checked_bit
from chshlab.tomography.xz import XZStabilizerSet, syndrome_determined

logger = logging.getLogger("chshlab.tomography.process")

# question 0 -> X, question 1 -> Z
BOB_BASES = (X, Z)
# Bob's observables when he also plays CHSH: G†XG and G†ZG
CHSH_FRAME_BASES = (dagger(G) @ X @ G, dagger(G) @ Z @ G)


# --- Devices ---
class ProcessAlice:
    """Alice's device: one syndrome bit per generator for every chunk of σ"""

    def start(self, m: int, rng: np.random.Generator) -> None:
        pass

    def report(
        self, j: int, chunk: Tuple[int, ...], stabilizers: XZStabilizerSet, register: QubitRegister, rng: np.random.Generator
    ) -> Tuple[int, ...]:
        raise NotImplementedError


class HonestProcessAlice(ProcessAlice):
    """Measures the generators on her halves; with `chsh_frame` applies G to each half first."""

    def __init__(self, chsh_frame: bool = False):
        self.chsh_frame = chsh_frame

    def labels(self, chunk: Tuple[int, ...]) -> List[Tuple[str, int]]:
        return [("A", i) for i in chunk]

    def report(self, j, chunk, stabilizers, register, rng):
        labels = self.labels(chunk)
        if self.chsh_frame:
            for label in labels:
                register.apply([label], G)
        return register.measure_reflections(labels, stabilizers.reflections(), rng)


class FlipSyndromeAlice(HonestProcessAlice):
    """Honest, except that generator `generator` is reported flipped in the given rounds"""

    def __init__(self, rounds: Sequence[int] = (0,), generator: int = 0, chsh_frame: bool = False):
        super().__init__(chsh_frame)
        self.rounds = set(rounds)
        self.generator = generator

    def report(self, j, chunk, stabilizers, register, rng):
        bits = list(super().report(j, chunk, stabilizers, register, rng))
        if j in self.rounds:
            bits[self.generator] ^= 1
        return tuple(bits)


class ShiftedAlice(HonestProcessAlice):
    """Measures the pairs one index further along, cyclically"""

    def start(self, m, rng):
        self.m = m

    def labels(self, chunk):
        return [("A", (i + 1) % self.m) for i in chunk]


class ProcessBob:
    """Bob's device: one answer bit per question"""

    def answer(self, j: int, question: int, register: QubitRegister, rng: np.random.Generator) -> int:
        raise NotImplementedError


class IdealProcessBob(ProcessBob):
    def __init__(self, chsh_frame: bool = False):
        self.bases = CHSH_FRAME_BASES if chsh_frame else BOB_BASES

    def answer(self, j, question, register, rng):
        return register.measure_reflections([("B", j)], [self.bases[question]], rng)[0]


class NoisyProcessBob(IdealProcessBob):
    """Flips each answer with probability p"""

    def __init__(self, p: float, chsh_frame: bool = False):
        if not 0 <= p <= 1:
            raise ValidationError(f"noise probability must lie in [0, 1], got {p}")
        super().__init__(chsh_frame)
        self.p = p

    def answer(self, j, question, register, rng):
        bit = super().answer(j, question, register, rng)
        return bit ^ int(rng.random() < self.p)


# --- Runs ---
@dataclass(frozen=True, eq=False)
class ProcessTomographyRun:
    """Complete transcript of one process tomography run"""

    r: int
    n: int
    m: int
    sigma: np.ndarray
    alice_syndromes: np.ndarray
    bob_questions: np.ndarray
    bob_answers: np.ndarray

    def __post_init__(self) -> None:
        if self.sigma.shape != (self.r * self.n,):
            raise DimensionError(f"σ has shape {self.sigma.shape}, expected ({self.r * self.n},)")
        if len(set(self.sigma.tolist())) != self.sigma.size or self.sigma.min() < 0 or self.sigma.max() >= self.m:
            raise ValidationError(f"σ must list {self.r * self.n} distinct indices in [0, {self.m})")
        if self.alice_syndromes.shape[0] != self.n:
            raise DimensionError(f"Alice's transcript must have {self.n} rounds")
        if self.bob_questions.shape != (self.m,) or self.bob_answers.shape != (self.m,):
            raise DimensionError(f"Bob's transcript must have {self.m} rounds")

    def chunk(self, j: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in self.sigma[j * self.r:(j + 1) * self.r])

    def prefix(self, rounds: int) -> "ProcessTomographyRun":
        """The first `rounds` of Alice's rounds, with Bob's full transcript."""
        return ProcessTomographyRun(
            self.r, rounds, self.m, self.sigma[: self.r * rounds], self.alice_syndromes[:rounds],
            self.bob_questions, self.bob_answers,
        )

    def records(self) -> List[TomographyRecord]:
        out = [
            TomographyRecord(
                round=j, recipient="A", question=",".join(map(str, self.chunk(j))),
                answer="".join(str(int(b)) for b in self.alice_syndromes[j]),
            )
            for j in range(self.n)
        ]
        out += [
            TomographyRecord(round=j, recipient="B", question=str(int(b)), answer=str(int(y)))
            for j, (b, y) in enumerate(zip(self.bob_questions, self.bob_answers))
        ]
        return out


def run_process_tomography(
    alice: ProcessAlice,
    bob: ProcessBob,
    stabilizers: XZStabilizerSet,
    n: int,
    m: Optional[int] = None,
    seed: int = 0,
    register: Optional[QubitRegister] = None,
) -> ProcessTomographyRun:
    """Simulate one run: Alice's n rounds on the chunks of σ first, then Bob's m rounds."""
    r = stabilizers.r
    m = r * n if m is None else m
    if n < 1:
        raise ValidationError(f"process tomography needs n ≥ 1, got {n}")
    if m < r * n:
        raise ValidationError(f"m = {m} pairs cannot hold σ of length rn = {r * n}")
    referee = stream(seed, "tomography/process/referee")
    devices = stream(seed, "tomography/process/devices")
    sigma = referee.choice(m, size=r * n, replace=False)
    questions = referee.integers(0, 2, size=m)
    register = epr_register(range(m)) if register is None else register

    alice.start(m, devices)
    syndromes = []
    for j in range(n):
        chunk = tuple(int(i) for i in sigma[j * r:(j + 1) * r])
        bits = alice.report(j, chunk, stabilizers, register, devices)
        if not isinstance(bits, (tuple, list)) or len(bits) != len(stabilizers):
            raise DeviceViolation(f"Alice returned {bits!r} in round {j}, expected {len(stabilizers)} bits")
        syndromes.append([checked_bit(b, "Alice", j) for b in bits])
    answers = np.array([checked_bit(bob.answer(j, int(questions[j]), register, devices), "Bob", j) for j in range(m)])
    logger.debug(f"📋 process tomography run r={r} n={n} m={m} seed={seed}")
    return ProcessTomographyRun(r, n, m, sigma, np.array(syndromes, dtype=int), questions, answers)


def count_mismatches(run: ProcessTomographyRun, stabilizers: XZStabilizerSet) -> int:
    if stabilizers.r != run.r:
        raise DimensionError(f"stabilizers act on {stabilizers.r} qubits, run on {run.r}")
    mismatches = 0
    for j in range(run.n):
        chunk = list(run.chunk(j))
        bases = run.bob_questions[chunk]
        answers = run.bob_answers[chunk]
        for k, p in enumerate(stabilizers.generators):
            sign = syndrome_determined(bases, answers, p)
            if sign is not None and sign != (-1) ** int(run.alice_syndromes[j, k]):
                mismatches += 1
    return mismatches


def process_tomography_verdict(run: ProcessTomographyRun, stabilizers: XZStabilizerSet) -> TomographyVerdict:
    mismatches = count_mismatches(run, stabilizers)
    return TomographyVerdict(kind="process", accepted=mismatches == 0, mismatches=mismatches)


def accept_process_tomography(run: ProcessTomographyRun, stabilizers: XZStabilizerSet) -> bool:
    verdict = process_tomography_verdict(run, stabilizers)
    logger.info(f"{'✅' if verdict.accepted else '❌'} process tomography: {verdict.mismatches} mismatched syndromes")
    return verdict.accepted
