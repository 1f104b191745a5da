# computation.py

"""
The computation set: Eve runs a circuit on Alice's side of q·n_s EPR pairs.

Eve draws a permutation σ of the pair indices and reveals it to Bob q entries at a time;
Bob answers each chunk exactly as in state tomography. Eve then picks blocks S ⊂ [n_s], one
per block the schedule needs, and directs Alice through the teleportation schedule one
Bell measurement at a time. Alice's requests are padded with decoy Bell measurements on
untouched pairs up to exactly n rounds. The set accepts iff the frame-corrected readout of the
first measured qubit is 1.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from chshlab.errors import CapacityError, ValidationError
from chshlab.linalg.register import QubitRegister, epr_register
from chshlab.rng import stream
from chshlab.schemas import ProtocolConfig
from chshlab.teleport.circuit import Circuit
from chshlab.teleport.compiler import TeleportSchedule, compile_circuit
from chshlab.teleport.devices import checked_outcome
from chshlab.teleport.executor import EXECUTE_GATE_CAP, EXECUTE_QUBIT_CAP, StepEngine, forget_qubits
from chshlab.teleport.frame import PauliFrame
from chshlab.teleport.resources import SLOT_ORDER, SLOT_POSITIONS
from chshlab.harness.devices import BELL_STABILIZERS, ProverPair, bell_index, syndrome_bits

logger = logging.getLogger("chshlab.harness.computation")

Layout = Callable[[int, int], int]


def check_circuit(cfg: ProtocolConfig, circuit: Circuit) -> TeleportSchedule:
    """The circuit's schedule, if it fits the configuration."""
    if not circuit.measured:
        raise ValidationError("the verification circuit must measure at least one qubit")
    if circuit.n_qubits > cfg.m:
        raise ValidationError(f"circuit uses {circuit.n_qubits} qubits, the workspace holds {cfg.m}")
    if circuit.n_qubits > EXECUTE_QUBIT_CAP or circuit.size > EXECUTE_GATE_CAP:
        raise CapacityError(
            f"{circuit.n_qubits} qubits / {circuit.size} gates exceed the cap of "
            f"{EXECUTE_QUBIT_CAP} qubits / {EXECUTE_GATE_CAP} gates"
        )
    if 2 * cfg.n + circuit.n_qubits > cfg.q * cfg.n_s:
        raise ValidationError(f"{cfg.q * cfg.n_s} pairs cannot hold {cfg.n} Alice rounds and the circuit's carriers")
    schedule = compile_circuit(circuit)
    if schedule.blocks_used > min(cfg.n, cfg.n_s):
        raise ValidationError(f"circuit needs {schedule.blocks_used} blocks, at most {min(cfg.n, cfg.n_s)} are available")
    if schedule.bell_measurements() > cfg.n:
        raise ValidationError(f"circuit needs {schedule.bell_measurements()} Bell measurements, Alice has {cfg.n} rounds")
    return schedule


def sigma_layout(sigma: np.ndarray, blocks: List[int], q: int) -> Layout:
    """Position p of the b-th used block sits at pair σ(S_b·q + p)."""

    def layout(block: int, position: int) -> int:
        return int(sigma[blocks[block] * q + position])

    return layout


@dataclass
class ComputationSet:
    sigma: np.ndarray
    blocks: List[int]
    bob_outcomes: List[int]
    alice_rounds: List[Tuple[Tuple[int, int], Tuple[int, int]]] = field(default_factory=list)
    bits: Dict[int, int] = field(default_factory=dict)
    frame: Optional[PauliFrame] = None
    accepted: bool = False

    def bob_chunk(self, j: int, q: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in self.sigma[j * q:(j + 1) * q])


def bob_rounds(
    cfg: ProtocolConfig, provers: ProverPair, sigma: np.ndarray, register: QubitRegister, rng: np.random.Generator
) -> List[int]:
    """Bob's n_s rounds, identical to his side of state tomography."""
    q = cfg.q
    bob = provers.state_bob
    bob.start(cfg.n_s, q, rng)
    outcomes = []
    for j in range(cfg.n_s):
        chunk = tuple(int(i) for i in sigma[j * q:(j + 1) * q])
        outcomes.append(checked_outcome(bob.report(j, chunk, register, rng), 2 ** q, "Bob"))
        for slot in SLOT_ORDER:
            forget_qubits(register, [("B", chunk[p]) for p in SLOT_POSITIONS[slot]])
    return outcomes


def run_computation(
    cfg: ProtocolConfig, circuit: Circuit, provers: ProverPair, seed: int = 0, register: Optional[QubitRegister] = None
) -> ComputationSet:
    schedule = check_circuit(cfg, circuit)
    q, n_s = cfg.q, cfg.n_s
    eve = stream(seed, "harness/compute/eve")
    devices = stream(seed, "harness/compute/devices")
    sigma = eve.permutation(q * n_s)
    blocks = sorted(int(j) for j in eve.choice(n_s, size=schedule.blocks_used, replace=False))
    register = epr_register(range(q * n_s)) if register is None else register

    result = ComputationSet(sigma, blocks, bob_rounds(cfg, provers, sigma, register, devices))
    reports = {b: result.bob_outcomes[j] for b, j in enumerate(blocks)}
    engine = StepEngine(schedule, reports, sigma_layout(sigma, blocks, q))
    track = engine.start()

    alice = provers.process_alice
    alice.start(q * n_s, devices)
    touched = set()

    def ask(chunk: Tuple[int, int]) -> int:
        j = len(result.alice_rounds)
        bits = syndrome_bits(alice.report(j, chunk, BELL_STABILIZERS, register, devices), j)
        result.alice_rounds.append((chunk, bits))
        touched.update(chunk)
        forget_qubits(register, [("A", i) for i in chunk])
        return bell_index(bits)

    for instruction in schedule.instructions:
        outcomes = [ask((carrier[1], target[1])) for carrier, target in engine.requests(instruction, track)]
        engine.update(instruction, track, outcomes)

    # decoys keep Alice's round count independent of the circuit; single-qubit prep slots of
    # unused blocks go first so the simulated groups stay small
    touched.update(label[1] for label in track.carriers.values())
    unused = [j for j in range(n_s) if j not in blocks]
    preps = [int(sigma[j * q]) for j in eve.permutation(unused)]
    taken = touched | set(preps)
    others = [int(i) for i in eve.permutation(q * n_s) if int(i) not in taken]
    spare = others[::-1] + preps[::-1]
    while len(result.alice_rounds) < cfg.n:
        ask((spare.pop(), spare.pop()))

    result.bits = dict(track.bits)
    result.frame = track.frame
    result.accepted = track.bits[circuit.measured[0]] == 1
    logger.debug(f"🧮 computation set used blocks {blocks} and {len(result.alice_rounds)} Alice rounds")
    return result
