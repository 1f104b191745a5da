# test_referee.py

import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.stats import chisquare

from chshlab.chsh.game import COS2, classical_strategy, ideal_chsh_strategy, outcome_distribution
from chshlab.errors import ValidationError
from chshlab.schemas import GameRecord
from chshlab.sequential.adversaries import adversary, honest_strategy
from chshlab.sequential.referee import (
    azuma_bound, hoeffding_pass_bound, protocol_completeness, protocol_soundness_floor,
    referee_threshold, referee_verdict, self_test_bounds, self_test_params, structure_violation_bound,
)
from chshlab.sequential.samplers import AdaptiveSampler, ProductSampler, sample_games, win_fraction, write_game_log


def sigma(p, count):
    return math.sqrt(p * (1 - p) / count)


# --- threshold and verdict ---
def test_threshold_at_ten_thousand_games():
    expected = COS2 * 1e4 - math.sqrt(1e4 * math.log(1e4)) / (2 * math.sqrt(2))
    assert referee_threshold(100, 100) == pytest.approx(expected, rel=1e-12)
    assert referee_threshold(100, 100) == pytest.approx(8428.2, abs=0.1)


def test_threshold_fraction_approaches_ideal_rate():
    assert referee_threshold(10 ** 4, 10 ** 4) / 10 ** 8 == pytest.approx(COS2, abs=2e-4)
    assert referee_threshold(10, 10) / 100 < referee_threshold(100, 100) / 10 ** 4


def test_threshold_needs_two_games():
    with pytest.raises(ValidationError):
        referee_threshold(1, 1)


def test_verdict_counts_wins():
    records = [GameRecord(round=i, a=0, b=0, x=0, y=0, win=1) for i in range(10)]
    verdict = referee_verdict(records, 2, 5, seed=3)
    assert verdict.games_won == 10 and verdict.accepted and verdict.seed == 3
    assert type(verdict.accepted) is bool
    with pytest.raises(ValidationError):
        referee_verdict(records, 3, 5)


def test_honest_provers_are_accepted():
    source = ProductSampler()
    accepted = sum(referee_verdict(sample_games(source, 10 ** 4, seed), 100, 100, seed).accepted for seed in range(200))
    assert accepted / 200 >= 0.95


def test_classical_provers_are_rejected():
    source = ProductSampler(classical_strategy())
    for seed in range(200):
        assert not referee_verdict(sample_games(source, 10 ** 4, seed), 100, 100, seed).accepted


def test_adaptive_provers_lose_more_games():
    honest = win_fraction(sample_games(ProductSampler(), 2000, seed=5))
    adaptive = win_fraction(sample_games(AdaptiveSampler(), 2000, seed=5))
    assert adaptive < honest - 0.05


# --- bounds ---
def test_hoeffding_bound_holds_empirically():
    n, delta = 2000, 0.05
    source = ProductSampler()
    passed = sum(
        sum(r.win for r in sample_games(source, n, seed)) >= (COS2 - delta) * n for seed in range(100)
    )
    assert passed / 100 >= hoeffding_pass_bound(n, delta) - 0.01


def test_hoeffding_bound_values():
    assert hoeffding_pass_bound(1000, 0.1) == pytest.approx(1 - math.exp(-20))
    assert hoeffding_pass_bound(1000, 0.0) == 0.0
    with pytest.raises(ValidationError):
        hoeffding_pass_bound(1000, 1.0)


def test_structure_violation_bound():
    assert structure_violation_bound(100, 0.5, 0.1, 0.01) == 1.0
    assert structure_violation_bound(10 ** 6, 0.5, 0.4, 0.01) == pytest.approx(math.exp(-2 * 10 ** 6 * 0.015 ** 2))


def test_azuma_and_protocol_bounds():
    assert azuma_bound(10, 10, 0.1, 0.1, 0.1) == 1.0
    t = 0.25 * 0.5 * 10 ** 6 / 8 - 1e-4 * 10 ** 8
    assert azuma_bound(10 ** 6, 100, 0.5, 0.5, 1e-4) == pytest.approx(math.exp(-t ** 2 / (2 * 10 ** 8)))
    assert protocol_completeness(100, 16) == pytest.approx(1 - 1e-8)
    assert protocol_soundness_floor(100, 16, 0.1) == pytest.approx(0.9 - 1e-4)


# --- self-test parameters ---
def test_self_test_rhs():
    assert self_test_params(0.5, 1, 1).rhs == pytest.approx(28672)
    assert self_test_params(1.0, 1, 1).rhs == pytest.approx(1792)


@pytest.mark.parametrize("eps", [0.3, 0.5, 1.0])
def test_self_test_solution(eps):
    params = self_test_params(eps, 1, 1)
    assert params.n_star / math.log(params.n_star) == pytest.approx(params.rhs, abs=1e-6)
    reference = brentq(lambda m: m / math.log(m) - params.rhs, math.e, 1e12)
    assert params.n_star == pytest.approx(reference, rel=1e-9)
    assert params.log_N == pytest.approx(6 * math.log(params.n_star))
    assert params.N == math.ceil(params.n_star) ** 6


def test_self_test_size_shrinks_with_eps():
    sizes = [self_test_params(eps, 1, 1).n_star for eps in (0.3, 0.5, 0.8)]
    assert sizes[0] > sizes[1] > sizes[2]


def test_self_test_uses_the_larger_game_count():
    params = self_test_params(1.0, 1, 1, n=10 ** 6)
    assert params.log_N == pytest.approx(6 * math.log(10 ** 6))


def test_self_test_degenerate_and_invalid():
    assert self_test_params(1.0, 0.01, 1).degenerate
    with pytest.raises(ValidationError):
        self_test_params(0.0, 1, 1)
    with pytest.raises(ValidationError):
        self_test_params(0.5, 1, 0.5)


def test_self_test_bounds():
    bounds = self_test_bounds(10, 1, 1)
    assert bounds["completeness"] == pytest.approx(1 - 10 ** -14)
    assert bounds["soundness"] == pytest.approx(10 ** -3.5)


# --- samplers ---
def test_sampling_is_repeatable():
    s = honest_strategy(2)
    assert sample_games(s, 200, seed=7) == sample_games(s, 200, seed=7)
    assert sample_games(ProductSampler(), 50, seed=7) == sample_games(ProductSampler(), 50, seed=7)
    assert sample_games(ProductSampler(), 50, seed=7) != sample_games(ProductSampler(), 50, seed=8)


def test_sequential_sampler_win_rates():
    count = 10 ** 4
    honest = win_fraction(sample_games(honest_strategy(2), count, seed=11))
    assert abs(honest - COS2) < 4 * sigma(COS2, count)
    classical = win_fraction(sample_games(adversary("classical", 2), count, seed=11))
    assert classical <= 0.75 + 4 * sigma(0.75, count)


def test_adaptive_adversary_switches_after_the_first_loss():
    source = adversary("adaptive", 2)
    assert isinstance(source, AdaptiveSampler)
    records = sample_games(source, 10 ** 4, seed=5)
    first_loss = next(i for i, r in enumerate(records) if not r.win)
    after = records[first_loss + 1:]
    assert all(r.x == 0 and r.y == 0 for r in after)
    assert abs(win_fraction(after) - 0.75) < 4 * sigma(0.75, len(after))


def test_adaptive_adversary_stays_honest_after_a_win():
    second = [sample_games(adversary("adaptive", 2), 2, seed) for seed in range(2000)]
    after_win = [g[1] for g in second if g[0].win]
    after_loss = [g[1] for g in second if not g[0].win]
    assert abs(win_fraction(after_win) - COS2) < 4 * sigma(COS2, len(after_win))
    assert after_loss and all(r.x == 0 and r.y == 0 for r in after_loss)


def test_sampled_outcomes_follow_the_born_rule():
    count = 10 ** 4
    records = sample_games(honest_strategy(2), count, seed=13)
    dist = outcome_distribution(ideal_chsh_strategy())
    keys = sorted(dist)
    observed = np.zeros(len(keys))
    for r in records:
        observed[keys.index((r.a, r.b, r.x, r.y))] += 1
    expected = np.array([dist[k] for k in keys]) * count
    assert chisquare(observed, expected).pvalue > 1e-3


def test_bob_flip_lowers_the_win_rate():
    count = 10 ** 4
    flipped = win_fraction(sample_games(ProductSampler(bob_flip=0.5), count, seed=2))
    assert abs(flipped - 0.5) < 4 * sigma(0.5, count)
    with pytest.raises(ValidationError):
        ProductSampler(bob_flip=1.5)


def test_game_log_lines(tmp_path):
    records = sample_games(ProductSampler(), 5, seed=0)
    path = tmp_path / "games.log"
    write_game_log(records, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == [r.line() for r in records]
