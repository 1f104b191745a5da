"""
Monte-Carlo front-ends producing game records.

A source is either an explicit SequentialStrategy, sampled run by run from its state vector,
or a sampler object with a `sample(count, rng)` method.
"""

import logging
import math
from pathlib import Path
from typing import List, Optional, Protocol, Sequence, Union

import numpy as np

from chshlab.chsh.game import CHSHStrategy, classical_strategy, ideal_chsh_strategy, outcome_distribution, wins
from chshlab.errors import ValidationError
from chshlab.rng import stream
from chshlab.schemas import GameRecord
from chshlab.sequential.strategy import SequentialStrategy, sample_transcript

logger = logging.getLogger("chshlab.sequential.samplers")

_OUTCOMES = [(a, b, x, y) for a in (0, 1) for b in (0, 1) for x in (0, 1) for y in (0, 1)]


class GameSampler(Protocol):
    def sample(self, count: int, rng: np.random.Generator) -> List[GameRecord]:
        ...


def _record(i: int, a: int, b: int, x: int, y: int) -> GameRecord:
    return GameRecord(round=i, a=a, b=b, x=x, y=y, win=int(wins(a, b, x, y)))


def _outcome_table(game: CHSHStrategy) -> np.ndarray:
    dist = outcome_distribution(game)
    p = np.array([dist[o] for o in _OUTCOMES])
    return p / p.sum()


class ProductSampler:
    """Every game played independently with one single-game strategy"""

    def __init__(self, game: Optional[CHSHStrategy] = None, bob_flip: float = 0.0):
        if not 0 <= bob_flip <= 1:
            raise ValidationError(f"flip probability must lie in [0, 1], got {bob_flip}")
        self.game = game or ideal_chsh_strategy()
        self.bob_flip = bob_flip
        self._p = _outcome_table(self.game)

    def sample(self, count: int, rng: np.random.Generator) -> List[GameRecord]:
        table = np.array(_OUTCOMES)[rng.choice(len(_OUTCOMES), size=count, p=self._p)]
        if self.bob_flip:
            table[:, 3] ^= (rng.random(count) < self.bob_flip).astype(table.dtype)
        return [_record(i, *map(int, row)) for i, row in enumerate(table)]


class AdaptiveSampler:
    """
    Plays `game` until the first lost game, then `fallback` for the rest.

    The switch uses both answers, so this models provers with a classical side channel; it is
    a soundness check on the referee, not a quantum strategy.
    """

    def __init__(self, game: Optional[CHSHStrategy] = None, fallback: Optional[CHSHStrategy] = None):
        self._p = _outcome_table(game or ideal_chsh_strategy())
        self._fallback = _outcome_table(fallback or classical_strategy())

    def sample(self, count: int, rng: np.random.Generator) -> List[GameRecord]:
        records = []
        lost = False
        for i in range(count):
            a, b, x, y = _OUTCOMES[int(rng.choice(len(_OUTCOMES), p=self._fallback if lost else self._p))]
            record = _record(i, a, b, x, y)
            lost = lost or not record.win
            records.append(record)
        return records


def sample_games(source: Union[SequentialStrategy, GameSampler], count: int, seed: int = 0) -> List[GameRecord]:
    """
    `count` game records. An explicit strategy is replayed from scratch every s.n games.
    Deterministic given the seed.
    """
    rng = stream(seed, "games")
    if not isinstance(source, SequentialStrategy):
        return source.sample(count, rng)

    records: List[GameRecord] = []
    for _ in range(math.ceil(count / source.n)):
        for a, b, x, y in sample_transcript(source, rng):
            if len(records) == count:
                break
            records.append(_record(len(records), a, b, x, y))
    logger.debug(f"🎲 sampled {count} games from {source.name}")
    return records


def win_fraction(records: Sequence[GameRecord]) -> float:
    return sum(r.win for r in records) / len(records) if records else 0.0


def write_game_log(records: Sequence[GameRecord], path: Union[str, Path]) -> None:
    Path(path).write_text("".join(r.line() + "\n" for r in records), encoding="utf-8")
