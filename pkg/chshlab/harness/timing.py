# timing.py

"""
Message timing shared by the four sub-protocols.

Every set opens with two prelude rounds (E2P/P2E, dummy while there are no extra provers)
followed by q·n_s rounds in which Alice and Bob each receive one message and send one reply.
Payloads are padded to a fixed width per device (Alice 2 tokens, Bob q tokens), so the
(round, direction, length) pattern a device sees never depends on the sub-protocol.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from chshlab.errors import ValidationError
from chshlab.schemas import GameRecord, MessageRecord

PRELUDE_ROUNDS = 2
ALICE_WIDTH = 2
DUMMY = "_"

# (question tokens, answer tokens)
Turn = Tuple[Sequence[str], Sequence[str]]


def pad(tokens: Sequence[str], width: int) -> List[str]:
    tokens = [str(t) for t in tokens]
    if len(tokens) > width:
        raise ValidationError(f"payload {tokens} is wider than {width} tokens")
    return tokens + [DUMMY] * (width - len(tokens))


@dataclass
class Timeline:
    q: int
    n_s: int
    messages: List[MessageRecord] = field(default_factory=list)
    round: int = 0

    @property
    def set_rounds(self) -> int:
        return self.q * self.n_s

    def _emit(self, direction: str, tokens: Sequence[str], width: int) -> None:
        self.messages.append(MessageRecord(round=self.round, direction=direction, payload=pad(tokens, width)))

    def add_set(self, alice: Dict[int, Turn], bob: Dict[int, Turn]) -> None:
        """One set; rounds missing from `alice` or `bob` carry dummy messages for that device."""
        for _ in range(PRELUDE_ROUNDS):
            self._emit("E2P", [], 1)
            self._emit("P2E", [], 1)
            self.round += 1
        for i in range(self.set_rounds):
            question, answer = alice.get(i, ((), ()))
            self._emit("E2A", question, ALICE_WIDTH)
            self._emit("A2E", answer, ALICE_WIDTH)
            question, answer = bob.get(i, ((), ()))
            self._emit("E2B", question, self.q)
            self._emit("B2E", answer, self.q)
            self.round += 1

    def add_chsh_sets(self, records: Sequence[GameRecord]) -> None:
        """Complete sets of CHSH games, one game per round."""
        size = self.set_rounds
        for start in range(0, len(records), size):
            chunk = records[start:start + size]
            self.add_set(
                {i: ((r.a,), (r.x,)) for i, r in enumerate(chunk)},
                {i: ((r.b,), (r.y,)) for i, r in enumerate(chunk)},
            )


def device_pattern(messages: Sequence[MessageRecord], device: str) -> List[Tuple[int, str, int]]:
    """(round, direction, payload length) of every message to or from `device` ("A", "B" or "P")."""
    return [(m.round, m.direction, len(m.payload)) for m in messages if device in m.direction]
