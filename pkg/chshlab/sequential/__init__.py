"""
Sequential CHSH games: strategies, exact evolution, the ideal-strategy pipeline and the referee.
"""

from .strategy import (
    FullTranscript, LocalTranscript, SequentialStrategy, TranscriptState, ancilla_extension,
    conjugate_strategy, device_evolution, double_strategy, evolve, extend_strategy,
    repeated_strategy, sample_transcript, simulation_distance, structured_profile,
    transcript_probability,
)
from .ideal import (
    MultiQubitStrategy, glue_to_ideal, guess_evolution, ideal_pipeline, is_single_qubit_ideal,
    make_multi_qubit_ideal, make_single_qubit_ideal, multi_qubit_strategy, pipeline_reference,
)
from .referee import (
    azuma_bound, hoeffding_pass_bound, protocol_completeness, protocol_soundness_floor,
    referee_threshold, referee_verdict, self_test_bounds, self_test_params,
    structure_violation_bound,
)
from .samplers import AdaptiveSampler, ProductSampler, sample_games, win_fraction, write_game_log
from .adversaries import ADVERSARIES, adversary, honest_strategy

__all__ = [
    "FullTranscript", "LocalTranscript", "SequentialStrategy", "TranscriptState",
    "ancilla_extension", "conjugate_strategy", "device_evolution", "double_strategy", "evolve",
    "extend_strategy", "repeated_strategy", "sample_transcript", "simulation_distance",
    "structured_profile", "transcript_probability",
    "MultiQubitStrategy", "glue_to_ideal", "guess_evolution", "ideal_pipeline",
    "is_single_qubit_ideal", "make_multi_qubit_ideal", "make_single_qubit_ideal",
    "multi_qubit_strategy", "pipeline_reference",
    "azuma_bound", "hoeffding_pass_bound", "protocol_completeness", "protocol_soundness_floor",
    "referee_threshold", "referee_verdict", "self_test_bounds", "self_test_params",
    "structure_violation_bound",
    "AdaptiveSampler", "ProductSampler", "sample_games", "win_fraction", "write_game_log",
    "ADVERSARIES", "adversary", "honest_strategy",
]
