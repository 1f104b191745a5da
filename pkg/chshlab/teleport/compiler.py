# compiler.py

"""
Compile a circuit into a teleportation schedule over gadget blocks.

Blocks are consumed left to right: one per qubit preparation, one per H, one per CNOT, one per
readout and two per G. The second G block is an AdaptiveBranch: Alice teleports into its I
slot or its H slot depending on whether the frame left a pending Hadamard.
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Union

from chshlab.teleport.circuit import Circuit

logger = logging.getLogger("chshlab.teleport.compiler")


@dataclass(frozen=True)
class Prepare:
    """Take the prep-slot qubit of `block` as the carrier of `qubit`."""

    qubit: int
    block: int


@dataclass(frozen=True)
class BellMeasure:
    """Bell-measure each carrier against the input of `slot` ("H", "G", "CNOT" or "readout")."""

    qubits: Tuple[int, ...]
    block: int
    slot: str


@dataclass(frozen=True)
class AdaptiveBranch:
    """Teleport `qubit` into the H slot of `block` if its frame has a pending Hadamard, else the I slot."""

    qubit: int
    block: int


Instruction = Union[Prepare, BellMeasure, AdaptiveBranch]


@dataclass(frozen=True)
class TeleportSchedule:
    circuit: Circuit
    instructions: Tuple[Instruction, ...]

    @property
    def blocks_used(self) -> int:
        return 1 + max(i.block for i in self.instructions)

    @property
    def adaptive_count(self) -> int:
        return sum(1 for i in self.instructions if isinstance(i, AdaptiveBranch))

    def bell_measurements(self) -> int:
        """Number of Bell measurements Alice performs (CNOT teleports two carriers)."""
        total = 0
        for i in self.instructions:
            if isinstance(i, BellMeasure):
                total += len(i.qubits)
            elif isinstance(i, AdaptiveBranch):
                total += 1
        return total


def block_count(circuit: Circuit) -> int:
    """#prep + #H + #CNOT + #measure + 2·#G."""
    counts = circuit.counts()
    return circuit.n_qubits + counts["H"] + counts["CNOT"] + len(circuit.measured) + 2 * counts["G"]


def compile_circuit(circuit: Circuit) -> TeleportSchedule:
    instructions = []
    block = 0
    for t in range(circuit.n_qubits):
        instructions.append(Prepare(t, block))
        block += 1
    for gate in circuit.gates:
        instructions.append(BellMeasure(gate.targets, block, gate.kind))
        block += 1
        if gate.kind == "G":
            instructions.append(AdaptiveBranch(gate.targets[0], block))
            block += 1
    for t in circuit.measured:
        instructions.append(BellMeasure((t,), block, "readout"))
        block += 1

    schedule = TeleportSchedule(circuit, tuple(instructions))
    logger.debug(f"🧩 compiled {circuit.size} gates into {schedule.blocks_used} blocks")
    return schedule
