# devices.py

"""
Provers for the full protocol.

Alice and Bob each keep one strategy per kind of message they can receive. Bob answers the
computation's block messages with his state tomography device and Alice answers its Bell
measurement requests with her process tomography device, so neither can tell those
sub-protocols apart from the inside.
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

from chshlab.errors import DeviceViolation
from chshlab.sequential.samplers import GameSampler, ProductSampler
from chshlab.teleport.resources import gadget_basis
from chshlab.tomography.process import (
    HonestProcessAlice, IdealProcessBob, NoisyProcessBob, ProcessAlice, ProcessBob, ShiftedAlice,
)
from chshlab.tomography.state import HonestStateBob, IdealStateAlice, NoisyStateBob, StateAlice, StateBob
from chshlab.tomography.xz import XZStabilizerSet

logger = logging.getLogger("chshlab.harness.devices")

# a Bell measurement is the joint measurement of XX and ZZ
BELL_STABILIZERS = XZStabilizerSet.from_labels(["XX", "ZZ"])


def bell_index(bits: Sequence[int]) -> int:
    """Syndrome bits (XX, ZZ) -> Bell outcome k, (I ⊗ Q_k)|ψ*⟩ with Q = I, X, Z, Y."""
    if len(bits) != 2:
        raise DeviceViolation(f"a Bell measurement reports two syndrome bits, got {tuple(bits)!r}")
    return 2 * int(bits[0]) + int(bits[1])


@dataclass
class ProverPair:
    name: str
    chsh: GameSampler = field(default_factory=ProductSampler)
    state_alice: StateAlice = field(default_factory=IdealStateAlice)
    state_bob: StateBob = field(default_factory=lambda: HonestStateBob(gadget_basis()))
    process_alice: ProcessAlice = field(default_factory=HonestProcessAlice)
    process_bob: ProcessBob = field(default_factory=IdealProcessBob)
    # probability that Bob's block report is replaced by a uniform one, used by exact enumeration
    report_noise: float = 0.0

    @classmethod
    def honest(cls) -> "ProverPair":
        return cls("honest")

    @classmethod
    def noisy_bob(cls, p: float) -> "ProverPair":
        """Bob garbles each CHSH answer and each block report with probability p."""
        return cls(
            f"noisy-bob({p:g})",
            chsh=ProductSampler(bob_flip=p),
            state_bob=NoisyStateBob(gadget_basis(), p),
            process_bob=NoisyProcessBob(p),
            report_noise=p,
        )

    @classmethod
    def qubit_shift_alice(cls) -> "ProverPair":
        """Alice Bell-measures the pairs one index further along than she is asked to."""
        return cls("qubit-shift-alice", process_alice=ShiftedAlice())

    @property
    def honest_alice(self) -> bool:
        return type(self.process_alice) is HonestProcessAlice and not self.process_alice.chsh_frame


def syndrome_bits(value, j: int) -> Tuple[int, int]:
    if not isinstance(value, (tuple, list)) or len(value) != 2 or any(b not in (0, 1) for b in value):
        raise DeviceViolation(f"Alice returned {value!r} in round {j}, expected two syndrome bits")
    return int(value[0]), int(value[1])
