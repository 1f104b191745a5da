# executor.py

"""
Execution of teleportation schedules on simulated provers.

Bob's blocks are prepared first: his side never depends on Alice's messages, so the order of
the two provers' operations does not change any distribution. Alice then performs the Bell
measurements the schedule asks for, adaptively, and Eve updates the Pauli frame from both
provers' reports. Two modes share the StepEngine:

  - sampled: devices draw Born outcomes from a seeded stream
  - exact: every Bell outcome of an honest Alice is enumerated; branches with the same frame,
    carriers and readout bits are merged when their carried states agree
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from chshlab.errors import CapacityError, ValidationError
from chshlab.linalg.operators import EPR
from chshlab.linalg.pauli import PauliString
from chshlab.linalg.register import Label, QubitRegister
from chshlab.rng import stream
from chshlab.schemas import EquivalenceReport
from chshlab.teleport.circuit import Circuit, direct_simulate, total_variation
from chshlab.teleport.compiler import AdaptiveBranch, Instruction, Prepare, TeleportSchedule, compile_circuit
from chshlab.teleport.devices import (
    BELL_PROJECTORS, ComputeAlice, ComputeBob, HonestComputeAlice, HonestComputeBob, checked_outcome,
)
from chshlab.teleport.frame import PauliFrame, frame_conjugate, outcome_parity, outcome_pauli
from chshlab.teleport.resources import BLOCK_QUBITS, SLOT_ORDER, SLOT_POSITIONS, ResourceState, decode_outcome

logger = logging.getLogger("chshlab.teleport.executor")

EXECUTE_QUBIT_CAP = 4
EXECUTE_GATE_CAP = 12
EXACT_QUBIT_CAP = 2
EXACT_GATE_CAP = 5
EXACT_TOLERANCE = 1e-9

Layout = Callable[[int, int], int]


def block_layout(block: int, position: int) -> int:
    return block * BLOCK_QUBITS + position


def _check_caps(circuit: Circuit, qubits: int, gates: int) -> None:
    if circuit.n_qubits > qubits or circuit.size > gates:
        raise CapacityError(
            f"{circuit.n_qubits} qubits / {circuit.size} gates exceed the cap of {qubits} qubits / {gates} gates"
        )


@dataclass
class Track:
    """Eve's view of a computation in progress"""

    frame: PauliFrame
    carriers: Dict[int, Label] = field(default_factory=dict)
    bits: Dict[int, int] = field(default_factory=dict)
    frames: List[PauliFrame] = field(default_factory=list)
    transcript: List[Tuple] = field(default_factory=list)

    def copy(self) -> "Track":
        return Track(self.frame, dict(self.carriers), dict(self.bits), list(self.frames), list(self.transcript))

    def key(self) -> Tuple:
        return self.frame.key(), tuple(sorted(self.carriers.items())), tuple(sorted(self.bits.items()))


class StepEngine:
    """Turns a schedule and Bob's block reports into Bell-measurement requests and frame updates"""

    def __init__(self, schedule: TeleportSchedule, reports: Dict[int, int], layout: Layout = block_layout):
        self.schedule = schedule
        self.reports = reports
        self.layout = layout
        self.resources = {b: decode_outcome(o) for b, o in reports.items()}

    def start(self) -> Track:
        track = Track(PauliFrame.identity(self.schedule.circuit.n_qubits))
        track.transcript = [("B", b, self.reports[b]) for b in sorted(self.reports)]
        return track

    def alice(self, block: int, position: int) -> Label:
        return ("A", self.layout(block, position))

    @staticmethod
    def slot(instruction: Instruction, track: Track) -> str:
        if isinstance(instruction, Prepare):
            return "prep"
        if isinstance(instruction, AdaptiveBranch):
            return "H" if track.frame.hadamards[instruction.qubit] else "I"
        return instruction.slot

    def _resource(self, block: int, slot: str) -> ResourceState:
        return self.resources[block]["prep" if slot == "readout" else slot]

    def requests(self, instruction: Instruction, track: Track) -> List[Tuple[Label, Label]]:
        """(carrier, resource input) pairs Alice must Bell-measure, in order."""
        slot = self.slot(instruction, track)
        block = instruction.block
        if slot == "prep":
            return []
        if slot == "readout":
            return [(track.carriers[instruction.qubits[0]], self.alice(block, 0))]
        if slot == "CNOT":
            c, t = instruction.qubits
            return [(track.carriers[c], self.alice(block, 7)), (track.carriers[t], self.alice(block, 9))]
        q = instruction.qubit if isinstance(instruction, AdaptiveBranch) else instruction.qubits[0]
        return [(track.carriers[q], self.alice(block, SLOT_POSITIONS[slot][0]))]

    def update(self, instruction: Instruction, track: Track, outcomes: Sequence[int]) -> None:
        slot = self.slot(instruction, track)
        block = instruction.block
        resource = self._resource(block, slot)
        frame = track.frame

        if slot == "prep":
            q = instruction.qubit
            frame = frame.left_multiply(resource.decoration, [q])
            track.carriers[q] = self.alice(block, 0)
        elif slot == "readout":
            q = instruction.qubits[0]
            # the ancilla is |digit⟩; the Bell parity compares it with the carrier
            track.bits[q] = outcome_parity(outcomes[0]) ^ resource.digit ^ frame.x_bit(q)
            del track.carriers[q]
        elif slot == "CNOT":
            c, t = instruction.qubits
            a, b = outcome_pauli(outcomes[0]), outcome_pauli(outcomes[1])
            m = resource.decoration * PauliString(a.letters + b.letters, a.phase + b.phase)
            frame, _ = frame_conjugate(frame.left_multiply(m, [c, t]), "CNOT", [c, t])
            track.carriers[c] = self.alice(block, 8)
            track.carriers[t] = self.alice(block, 10)
        else:
            q = instruction.qubit if isinstance(instruction, AdaptiveBranch) else instruction.qubits[0]
            m = resource.decoration * outcome_pauli(outcomes[0])
            if isinstance(instruction, AdaptiveBranch):
                frame = frame.settle(m, q) if slot == "H" else frame.left_multiply(m, [q])
            else:
                frame, _ = frame_conjugate(frame.left_multiply(m, [q]), slot, [q])
            track.carriers[q] = self.alice(block, SLOT_POSITIONS[slot][1])

        track.frame = frame
        track.frames.append(frame)
        track.transcript.append(("A", block, slot, tuple(outcomes)))


def forget_qubits(register: QubitRegister, labels: Sequence[Label]) -> None:
    """Drop qubits the devices left in a product state; entangled ones stay."""
    try:
        register.release(list(labels))
    except ValidationError:
        logger.debug(f"qubits {labels} stay entangled after the device acted")


def prepare_blocks(
    schedule: TeleportSchedule,
    bob: ComputeBob,
    register: QubitRegister,
    rng: np.random.Generator,
    layout: Layout = block_layout,
    entangled: bool = True,
) -> Dict[int, int]:
    """
    Share eleven EPR pairs per block and collect Bob's reports. With entangled=False a Bob that
    offers sample_resources() hands over Alice's collapsed states directly.
    """
    reports = {}
    for block in range(schedule.blocks_used):
        pairs = [layout(block, p) for p in range(BLOCK_QUBITS)]
        shortcut = None if entangled else bob.sample_resources(rng)
        if shortcut is None:
            for j in pairs:
                register.add([("A", j), ("B", j)], EPR)
            outcome = bob.prepare(register, [("B", j) for j in pairs], rng)
            for slot in SLOT_ORDER:
                forget_qubits(register, [("B", pairs[p]) for p in SLOT_POSITIONS[slot]])
        else:
            outcome, states = shortcut
            for slot in SLOT_ORDER:
                register.add([("A", pairs[p]) for p in SLOT_POSITIONS[slot]], states[slot])
        reports[block] = checked_outcome(outcome, 2 ** BLOCK_QUBITS, "Bob")
    return reports


def used_slots(schedule: TeleportSchedule) -> Dict[int, Tuple[str, ...]]:
    """Slots of each block the schedule can draw on; a correction block may use either of two."""
    used = {}
    for i in schedule.instructions:
        if isinstance(i, Prepare):
            used[i.block] = ("prep",)
        elif isinstance(i, AdaptiveBranch):
            used[i.block] = ("I", "H")
        else:
            used[i.block] = ("prep",) if i.slot == "readout" else (i.slot,)
    return used


def _discard_unused(schedule: TeleportSchedule, register: QubitRegister, layout: Layout) -> None:
    for block, slots in used_slots(schedule).items():
        for slot in SLOT_ORDER:
            if slot not in slots:
                forget_qubits(register, [("A", layout(block, p)) for p in SLOT_POSITIONS[slot]])


@dataclass
class ExecutionResult:
    bits: Tuple[int, ...]
    frames: List[PauliFrame]
    transcript: List[Tuple]
    reports: Dict[int, int]
    blocks_used: int
    carriers: Dict[int, Label] = field(default_factory=dict)

    @property
    def output(self) -> str:
        return "".join(map(str, self.bits))


def run_schedule(
    schedule: TeleportSchedule,
    alice: ComputeAlice,
    bob: ComputeBob,
    rng: np.random.Generator,
    layout: Layout = block_layout,
    entangled_bob: bool = True,
    register: Optional[QubitRegister] = None,
) -> ExecutionResult:
    register = QubitRegister() if register is None else register
    reports = prepare_blocks(schedule, bob, register, rng, layout, entangled_bob)
    engine = StepEngine(schedule, reports, layout)
    track = engine.start()
    for instruction in schedule.instructions:
        outcomes = []
        for pair in engine.requests(instruction, track):
            outcomes.append(checked_outcome(alice.bell_measure(register, pair, rng), 4, "Alice"))
            forget_qubits(register, pair)
        engine.update(instruction, track, outcomes)
    bits = tuple(track.bits[t] for t in schedule.circuit.measured)
    return ExecutionResult(bits, track.frames, track.transcript, reports, schedule.blocks_used, track.carriers)


def execute(
    circuit: Circuit,
    alice: Optional[ComputeAlice] = None,
    bob: Optional[ComputeBob] = None,
    seed: int = 0,
    layout: Layout = block_layout,
    entangled_bob: bool = True,
) -> ExecutionResult:
    """One run of the teleported computation; honest devices by default."""
    _check_caps(circuit, EXECUTE_QUBIT_CAP, EXECUTE_GATE_CAP)
    rng = stream(seed, "teleport/execute")
    return run_schedule(
        compile_circuit(circuit), alice or HonestComputeAlice(), bob or HonestComputeBob(), rng, layout, entangled_bob
    )


def sample_outputs(
    circuit: Circuit,
    samples: int,
    seed: int = 0,
    alice: Optional[ComputeAlice] = None,
    bob: Optional[ComputeBob] = None,
    entangled_bob: bool = False,
) -> Dict[str, float]:
    """Empirical output distribution over `samples` independent runs."""
    _check_caps(circuit, EXECUTE_QUBIT_CAP, EXECUTE_GATE_CAP)
    schedule = compile_circuit(circuit)
    alice, bob = alice or HonestComputeAlice(), bob or HonestComputeBob()
    rng = stream(seed, "teleport/samples")
    counts: Dict[str, int] = {}
    for _ in range(samples):
        output = run_schedule(schedule, alice, bob, rng, entangled_bob=entangled_bob).output
        counts[output] = counts.get(output, 0) + 1
    return {k: v / samples for k, v in sorted(counts.items())}


def bell_branches(
    register: QubitRegister, pairs: Sequence[Tuple[Label, Label]], weight: float = 1.0
) -> List[Tuple[float, QubitRegister, Tuple[int, ...]]]:
    """Every joint outcome of Bell-measuring `pairs` in order, zero-probability ones skipped."""
    partial = [(weight, register, ())]
    for pair in pairs:
        deeper = []
        for p, reg, ks in partial:
            for k, pk, child in reg.branches(list(pair), BELL_PROJECTORS):
                forget_qubits(child, pair)
                deeper.append((p * pk, child, ks + (k,)))
        partial = deeper
    return partial


def advance_exact(
    engine: StepEngine, instruction: Instruction, branches: List[Tuple[float, QubitRegister, Track]]
) -> List[Tuple[float, QubitRegister, Track]]:
    """One instruction of an honest Alice on every branch."""
    grown = []
    for p, register, track in branches:
        for pk, child, ks in bell_branches(register, engine.requests(instruction, track), p):
            moved = track.copy()
            engine.update(instruction, moved, ks)
            grown.append((pk, child, moved))
    return grown


def _merge(branches: List[Tuple[float, QubitRegister, Track]]) -> List[Tuple[float, QubitRegister, Track]]:
    merged: Dict[Tuple, List[List]] = {}
    for p, register, track in branches:
        labels = [track.carriers[q] for q in sorted(track.carriers)]
        rho = register.reduced(labels) if labels else None
        bucket = merged.setdefault(track.key(), [])
        for entry in bucket:
            if rho is None or np.allclose(entry[3], rho, atol=1e-10):
                entry[0] += p
                break
        else:
            bucket.append([p, register, track, rho])
    return [(e[0], e[1], e[2]) for bucket in merged.values() for e in bucket]


def exact_distribution(
    circuit: Circuit, bob: Optional[ComputeBob] = None, seed: int = 0, layout: Layout = block_layout
) -> Dict[str, float]:
    """
    Output distribution with every Bell outcome of an honest Alice enumerated, for one draw of
    Bob's reports.
    """
    _check_caps(circuit, EXACT_QUBIT_CAP, EXACT_GATE_CAP)
    schedule = compile_circuit(circuit)
    rng = stream(seed, "teleport/exact")
    register = QubitRegister()
    reports = prepare_blocks(schedule, bob or HonestComputeBob(), register, rng, layout)
    _discard_unused(schedule, register, layout)
    engine = StepEngine(schedule, reports, layout)

    branches = [(1.0, register, engine.start())]
    for instruction in schedule.instructions:
        branches = _merge(advance_exact(engine, instruction, branches))

    dist: Dict[str, float] = {}
    for p, _, track in branches:
        key = "".join(str(track.bits[t]) for t in circuit.measured)
        dist[key] = dist.get(key, 0.0) + p
    logger.debug(f"🌿 exact run kept {len(branches)} branches")
    return dict(sorted(dist.items()))


def equivalence_check(circuit: Circuit, samples: int = 10_000, seed: int = 0, mode: Optional[str] = None) -> EquivalenceReport:
    """Teleported output distribution against direct simulation."""
    direct = direct_simulate(circuit)
    if mode is None:
        small = circuit.n_qubits <= EXACT_QUBIT_CAP and circuit.size <= EXACT_GATE_CAP
        mode = "exact" if small else "sampled"

    if mode == "exact":
        teleported = exact_distribution(circuit, seed=seed)
        tolerance = EXACT_TOLERANCE
        tv = total_variation(teleported, direct)
        passed = tv <= tolerance
    elif mode == "sampled":
        teleported = sample_outputs(circuit, samples, seed)
        tv = total_variation(teleported, direct)
        tolerance, passed = 0.0, True
        for key in set(direct) | set(teleported):
            p = direct.get(key, 0.0)
            allowed = 4 * math.sqrt(p * (1 - p) / samples) + 1e-12
            tolerance = max(tolerance, allowed)
            passed = passed and abs(teleported.get(key, 0.0) - p) <= allowed
    else:
        raise ValidationError(f"unknown equivalence mode '{mode}'")

    report = EquivalenceReport(
        mode=mode, total_variation=tv, tolerance=tolerance, passed=passed,
        teleported=teleported, direct=direct, blocks_used=compile_circuit(circuit).blocks_used,
    )
    if passed:
        logger.info(f"✅ teleported and direct outputs agree ({mode}, TV {tv:.3g})")
    else:
        logger.warning(f"❌ teleported output differs from direct simulation ({mode}, TV {tv:.3g})")
    return report
