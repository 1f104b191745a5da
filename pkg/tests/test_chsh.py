# test_chsh.py

import itertools

import numpy as np
import pytest

from chshlab.chsh.game import (
    COS2, TSIRELSON, CHSHStrategy, anti_ideal_strategy, classical_strategy,
    conditional_win_probabilities, correlation_value, ideal_chsh_strategy, is_structured,
    min_outcome_probability, normalized_branch, outcome_distribution, outcome_unitary,
    product_strategy, rotated_bob_strategy, win_probability,
)
from chshlab.chsh.rigidity import pull_over_residual, rigidity_analyze
from chshlab.errors import ValidationError
from chshlab.linalg.operators import KET0, X, Z, apply_local, kron, random_reflection, random_state
from chshlab.rng import stream

SIN2 = np.sin(np.pi / 8) ** 2
SWEEP = [0.2, 0.1, 0.05, 0.02, 0.01]
# below this ε every one of the sixteen outcomes keeps probability at least 1/60
STRUCTURED_CUTOFF = 1e-3


def test_ideal_numbers():
    s = ideal_chsh_strategy()
    assert win_probability(s) == pytest.approx(COS2, abs=1e-12)
    assert correlation_value(s) == pytest.approx(TSIRELSON, abs=1e-12)


def test_ideal_wins_with_same_probability_for_every_question_and_answer():
    for key, p in conditional_win_probabilities(ideal_chsh_strategy()).items():
        assert p == pytest.approx(COS2, abs=1e-12), key


def test_ideal_outcome_probabilities():
    dist = outcome_distribution(ideal_chsh_strategy())
    # quarter for the questions, half cos² for the answers
    assert dist[(0, 0, 0, 0)] == pytest.approx(COS2 / 8, abs=1e-12)
    assert dist[(0, 0, 0, 1)] == pytest.approx(SIN2 / 8, abs=1e-12)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-10)


def test_product_state_is_deterministic():
    psi = kron(KET0, KET0)
    s = CHSHStrategy(psi, (2, 2, 1), (Z, Z), (Z, Z))
    dist = outcome_distribution(s)
    for a, b in itertools.product((0, 1), repeat=2):
        assert dist[(a, b, 0, 0)] == pytest.approx(0.25)


def test_classical_strategy():
    s = classical_strategy()
    assert correlation_value(s) == pytest.approx(2.0)
    assert win_probability(s) == pytest.approx(0.75)


def test_anti_ideal_correlation():
    assert correlation_value(anti_ideal_strategy()) == pytest.approx(-TSIRELSON, abs=1e-12)


def test_is_structured():
    assert is_structured(ideal_chsh_strategy(), 0.0 + 1e-12)
    assert not is_structured(classical_strategy(), 0.1)
    rotated = rotated_bob_strategy(0.1)
    assert is_structured(rotated, 0.05) == (correlation_value(rotated) >= TSIRELSON - 0.05)


def test_invalid_reflection_rejected():
    with pytest.raises(ValidationError):
        CHSHStrategy(kron(KET0, KET0), (2, 2, 1), (Z, 0.5 * Z), (Z, Z))


@pytest.mark.parametrize("batch", range(10))
def test_tsirelson_bound_on_random_strategies(batch):
    rng = stream(batch, "tsirelson")
    for _ in range(100):
        da, db = (int(d) for d in rng.integers(1, 5, size=2))
        dc = int(rng.integers(1, 3))
        s = CHSHStrategy(
            random_state(da * db * dc, rng),
            (da, db, dc),
            (random_reflection(da, rng), random_reflection(da, rng)),
            (random_reflection(db, rng), random_reflection(db, rng)),
        )
        corr = correlation_value(s)
        assert corr == pytest.approx(4 * (2 * win_probability(s) - 1), abs=1e-10)
        assert abs(corr) <= TSIRELSON + 1e-9


@pytest.mark.parametrize("phi", SWEEP)
def test_structured_strategies_have_no_rare_outcome(phi):
    s = rotated_bob_strategy(phi, both=True)
    if TSIRELSON - correlation_value(s) < STRUCTURED_CUTOFF:
        assert min_outcome_probability(s) >= 1 / 60


def test_outcome_unitaries_relate_ideal_branches():
    s = ideal_chsh_strategy()
    for a, x, a2, x2, b, y in itertools.product((0, 1), repeat=6):
        target = normalized_branch(s, a, x, b, y)
        moved = apply_local(outcome_unitary(a, a2, x ^ x2), normalized_branch(s, a2, x2, b, y), s.dims, [0])
        # branches are normalized, so only a global phase may separate them
        assert abs(np.vdot(target, moved)) == pytest.approx(1.0, abs=1e-9)


def test_outcome_unitary_table_entries():
    assert np.allclose(outcome_unitary(0, 0, 0), np.eye(2))
    assert np.allclose(outcome_unitary(0, 0, 1), X)
    assert np.allclose(outcome_unitary(1, 1, 1), Z)


# --- rigidity ---
def test_ideal_rigidity_report_is_exact():
    report = rigidity_analyze(ideal_chsh_strategy())
    assert report.epsilon == pytest.approx(0.0, abs=1e-12)
    for value in (report.m_residual, report.alice_x_residual, report.bob_x_residual, report.state_residual):
        assert value == pytest.approx(0.0, abs=1e-9)
    for block in report.alice_blocks + report.bob_blocks:
        assert block.theta == pytest.approx(np.pi / 4)


def test_m_residual_matches_correlation(rng):
    for _ in range(20):
        s = CHSHStrategy(
            random_state(9, rng), (3, 3, 1),
            (random_reflection(3, rng), random_reflection(3, rng)),
            (random_reflection(3, rng), random_reflection(3, rng)),
        )
        report = rigidity_analyze(s)
        assert report.extended_correlation == pytest.approx(report.correlation, abs=1e-9)
        assert report.m_residual == pytest.approx(
            (TSIRELSON - report.extended_correlation) / np.sqrt(2), abs=1e-9
        )


def test_rigidity_residuals_vanish_with_rotation():
    reports = [rigidity_analyze(rotated_bob_strategy(phi)) for phi in SWEEP]
    for before, after in zip(reports, reports[1:]):
        assert after.epsilon < before.epsilon
        assert after.bob_x_residual < before.bob_x_residual
        assert after.alice_x_residual <= before.alice_x_residual + 1e-9
        assert after.state_residual <= before.state_residual + 1e-9
    for report in reports:
        assert report.epsilon > 0
        for residual in (report.alice_x_residual, report.bob_x_residual, report.state_residual):
            assert residual / np.sqrt(report.epsilon) < 5.0


def test_mixture_of_ideal_copies():
    report = rigidity_analyze(product_strategy({0: 0.3, 1: 0.7}))
    assert [b.theta for b in report.alice_blocks] == pytest.approx([np.pi / 4] * 2)
    assert [b.theta for b in report.bob_blocks] == pytest.approx([np.pi / 4] * 2)
    assert sum(b.weight for b in report.alice_blocks) == pytest.approx(1.0)
    assert report.state_residual == pytest.approx(0.0, abs=1e-9)
    assert report.alice_x_residual == pytest.approx(0.0, abs=1e-9)
    assert report.bob_x_residual == pytest.approx(0.0, abs=1e-9)


def test_classical_strategy_is_padded():
    report = rigidity_analyze(classical_strategy())
    assert report.padded
    assert report.correlation == pytest.approx(2.0)


@pytest.mark.parametrize("device", ["A", "B"])
@pytest.mark.parametrize("alpha", [0, 1])
def test_pull_over(device, alpha):
    assert pull_over_residual(ideal_chsh_strategy(), device, alpha) == pytest.approx(0.0, abs=1e-9)
    assert pull_over_residual(classical_strategy(), device, alpha) > 0.1
    for phi in SWEEP:
        s = rotated_bob_strategy(phi)
        eps = TSIRELSON - correlation_value(s)
        assert pull_over_residual(s, device, alpha) <= 5.0 * np.sqrt(eps)
