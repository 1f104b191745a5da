"""
CHSH game engines and rigidity analysis.
"""

from .game import (
    COS2, TSIRELSON, CHSHStrategy, anti_ideal_strategy, classical_strategy,
    conditional_win_probabilities, correlation_value, ideal_chsh_strategy, is_structured,
    min_outcome_probability, outcome_distribution, outcome_unitary, product_strategy,
    rotated_bob_strategy, win_probability,
)
from .rigidity import pull_over_residual, rigidity_analyze
from .extended import (
    DIRECTIONS, ExtendedStrategy, conjugated_extended_strategy, extended_distribution,
    extended_rigidity_metrics, extended_structured_gap, ideal_extended_strategy,
)

__all__ = [
    "COS2", "TSIRELSON", "CHSHStrategy", "anti_ideal_strategy", "classical_strategy",
    "conditional_win_probabilities", "correlation_value", "ideal_chsh_strategy",
    "is_structured", "min_outcome_probability", "outcome_distribution", "outcome_unitary",
    "product_strategy", "rotated_bob_strategy", "win_probability",
    "pull_over_residual", "rigidity_analyze",
    "DIRECTIONS", "ExtendedStrategy", "conjugated_extended_strategy", "extended_distribution",
    "extended_rigidity_metrics", "extended_structured_gap", "ideal_extended_strategy",
]
