# test_tomography_process.py

import itertools
import math

import numpy as np
import pytest

from chshlab.errors import DeviceViolation, DimensionError, ValidationError
from chshlab.linalg.pauli import PauliString
from chshlab.tomography.process import (
    FlipSyndromeAlice, HonestProcessAlice, IdealProcessBob, NoisyProcessBob, ProcessAlice,
    ProcessTomographyRun, ShiftedAlice, accept_process_tomography, count_mismatches,
    process_tomography_verdict, run_process_tomography,
)
from chshlab.tomography.xz import XZStabilizerSet, syndrome_determined, xz_strings

BELL_PAIR = XZStabilizerSet.from_labels(["XX", "ZZ"])
GHZ = XZStabilizerSet.from_labels(["ZZI", "IZZ", "XXX"])


def run(alice, seed, stabilizers=BELL_PAIR, n=64, bob=None):
    return run_process_tomography(alice, bob or IdealProcessBob(), stabilizers, n, seed=seed)


def rejection_rate(make_alice, trials, n=8):
    return sum(not accept_process_tomography(run(make_alice(), seed, n=n), BELL_PAIR) for seed in range(trials)) / trials


# --- stabilizer sets ---
def test_stabilizer_set_validation():
    assert len(GHZ) == 3 and GHZ.r == 3
    assert XZStabilizerSet.from_labels(["-ZZ"]).generators[0].phase == 2
    with pytest.raises(ValidationError):
        XZStabilizerSet.from_labels(["XX", "ZI"])
    with pytest.raises(ValidationError):
        XZStabilizerSet.from_labels(["XX", "XX"])
    with pytest.raises(ValidationError):
        XZStabilizerSet.from_labels(["XI", "IX", "XX"])
    with pytest.raises(ValidationError):
        XZStabilizerSet.from_labels(["YY"])
    with pytest.raises(DimensionError):
        XZStabilizerSet(2, (PauliString("XXX"),))


# --- syndromes ---
def test_syndrome_examples():
    assert syndrome_determined([0, 0], [0, 1], PauliString("XX")) == -1
    assert syndrome_determined([0, 0], [0, 1], PauliString("XZ")) is None
    assert syndrome_determined([1, 0], [1, 1], PauliString("ZI")) == -1
    assert syndrome_determined([1, 0], [1, 1], PauliString("ZI", 2)) == 1
    with pytest.raises(DimensionError):
        syndrome_determined([0], [0, 1], PauliString("XX"))


def test_syndrome_table_matches_group_membership():
    # P is fixed by the measurement iff it lies in the group of the measured one-qubit Paulis
    for p in xz_strings(2):
        for bases in itertools.product((0, 1), repeat=2):
            group = {}
            for subset in itertools.product((False, True), repeat=2):
                letters = "".join("XZ"[b] if s else "I" for b, s in zip(bases, subset))
                group[letters] = subset
            for answers in itertools.product((0, 1), repeat=2):
                sign = syndrome_determined(bases, answers, p)
                if p.letters in group:
                    subset = group[p.letters]
                    expected = math.prod((-1) ** a for a, s in zip(answers, subset) if s)
                    assert sign == expected
                else:
                    assert sign is None


# --- honest runs ---
@pytest.mark.parametrize("stabilizers", [BELL_PAIR, GHZ], ids=["bell", "ghz"])
def test_honest_provers_always_pass(stabilizers):
    for seed in range(100):
        assert accept_process_tomography(run(HonestProcessAlice(), seed, stabilizers, n=32), stabilizers)


def test_honest_provers_pass_in_the_chsh_frame():
    for seed in range(20):
        result = run(HonestProcessAlice(chsh_frame=True), seed, bob=IdealProcessBob(chsh_frame=True))
        assert accept_process_tomography(result, BELL_PAIR)


def test_run_shape_and_records():
    result = run(HonestProcessAlice(), 1, n=10)
    assert result.m == 20 and result.alice_syndromes.shape == (10, 2)
    records = result.records()
    assert len(records) == 30
    assert records[0].recipient == "A" and len(records[0].answer) == 2
    with pytest.raises(ValidationError):
        run_process_tomography(HonestProcessAlice(), IdealProcessBob(), BELL_PAIR, 10, m=19)


def test_runs_repeat_with_the_seed():
    a, b = run(HonestProcessAlice(), 9), run(HonestProcessAlice(), 9)
    assert np.array_equal(a.alice_syndromes, b.alice_syndromes)
    assert np.array_equal(a.bob_answers, b.bob_answers)


# --- cheaters ---
def test_single_flip_is_caught_at_the_determination_rate():
    trials = 400
    rate = rejection_rate(lambda: FlipSyndromeAlice(rounds=(0,), generator=0), trials)
    d = 1 / 2 ** 2
    assert abs(rate - d) < 4 * math.sqrt(d * (1 - d) / trials)


def test_repeated_flips_compound():
    trials = 400
    rate = rejection_rate(lambda: FlipSyndromeAlice(rounds=(0, 1, 2), generator=1), trials)
    d = 1 - (3 / 4) ** 3
    assert abs(rate - d) < 4 * math.sqrt(d * (1 - d) / trials)


def test_shifted_alice_is_rejected():
    rejected = sum(not accept_process_tomography(run(ShiftedAlice(), seed), BELL_PAIR) for seed in range(100))
    assert rejected / 100 >= 0.99


def test_noisy_bob_is_sometimes_rejected():
    verdict = process_tomography_verdict(run(HonestProcessAlice(), 0, bob=NoisyProcessBob(0.2)), BELL_PAIR)
    assert not verdict.accepted and verdict.mismatches > 0
    with pytest.raises(ValidationError):
        NoisyProcessBob(2.0)


class ShortAlice(ProcessAlice):
    def report(self, j, chunk, stabilizers, register, rng):
        return (0,)


def test_wrong_syndrome_arity():
    with pytest.raises(DeviceViolation):
        run(ShortAlice(), 0)


# --- acceptance rule ---
def hand_run(syndromes, questions, answers):
    return ProcessTomographyRun(
        2, len(syndromes), 2 * len(syndromes), np.arange(2 * len(syndromes)),
        np.array(syndromes), np.array(questions), np.array(answers),
    )


def test_one_flipped_determined_bit_rejects():
    # Bob measured X on both qubits and saw (+, −): XX has sign −1
    assert accept_process_tomography(hand_run([[1, 0]], [0, 0], [0, 1]), BELL_PAIR)
    assert not accept_process_tomography(hand_run([[0, 0]], [0, 0], [0, 1]), BELL_PAIR)


def test_undetermined_rounds_impose_nothing():
    stabilizers = XZStabilizerSet.from_labels(["ZZ"])
    for bits in ([[0]], [[1]]):
        assert accept_process_tomography(hand_run(bits, [0, 0], [1, 0]), stabilizers)
        assert accept_process_tomography(hand_run(bits, [0, 1], [1, 0]), stabilizers)


def test_mismatches_only_grow_with_more_rounds():
    honest = run(HonestProcessAlice(), 3, n=32)
    cheat = run(FlipSyndromeAlice(rounds=range(0, 32, 2)), 3, n=32)
    assert all(accept_process_tomography(honest.prefix(k), BELL_PAIR) for k in range(1, 33))
    counts = [count_mismatches(cheat.prefix(k), BELL_PAIR) for k in range(1, 33)]
    assert counts == sorted(counts)


def test_stabilizer_size_must_match_the_run():
    with pytest.raises(DimensionError):
        count_mismatches(hand_run([[0, 0]], [0, 0], [0, 0]), GHZ)
