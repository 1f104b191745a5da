# nodes.py

import logging
from typing import Any, Dict, Tuple

from langchain_core.runnables import Runnable

from chshlab.errors import LabError
from chshlab.rng import stream
from chshlab.schemas import SUBPROTOCOLS, ProtocolConfig, RunLog
from chshlab.sequential.referee import referee_verdict
from chshlab.sequential.samplers import sample_games, win_fraction
from chshlab.teleport.resources import gadget_basis, outcome_bits
from chshlab.tomography.process import process_tomography_verdict, run_process_tomography
from chshlab.tomography.state import product_tomography_verdict, run_state_tomography
from chshlab.harness.computation import run_computation
from chshlab.harness.devices import BELL_STABILIZERS
from chshlab.harness.timing import Timeline

logger = logging.getLogger("chshlab.harness.nodes")


def choose_subprotocol(cfg: ProtocolConfig, seed: int) -> Tuple[str, int]:
    """Eve's private choice: the sub-protocol and the set K ∈ [1, N] where the test happens."""
    rng = stream(seed, "harness/choose")
    probabilities = cfg.probabilities()
    name = SUBPROTOCOLS[int(rng.choice(len(SUBPROTOCOLS), p=[probabilities[s] for s in SUBPROTOCOLS]))]
    K = int(rng.integers(1, cfg.N + 1))
    return name, K


def _chsh_prefix(state: Dict[str, Any], sets: int) -> Timeline:
    """Timeline holding `sets` refereed-but-ignored sets of CHSH games."""
    cfg = state["cfg"]
    timeline = Timeline(cfg.q, cfg.n_s)
    if sets:
        timeline.add_chsh_sets(sample_games(state["provers"].chsh, sets * cfg.q * cfg.n_s, seed=state["seed"]))
    return timeline


def _failed(state: Dict[str, Any], timeline: Timeline, error: LabError) -> Dict[str, Any]:
    logger.error(f"❌ {state['subprotocol']} sub-protocol aborted: {error}")
    return {**state, "timeline": timeline, "accepted": False, "details": {}, "error": str(error)}


class ChooseSubprotocolNode(Runnable):
    def invoke(self, state: Dict[str, Any], run_config: Dict[str, Any] = {}) -> Dict[str, Any]:
        name, K = choose_subprotocol(state["cfg"], state["seed"])
        name = state.get("forced") or name
        K = state.get("forced_K") or K
        logger.info(f"🎲 seed {state['seed']}: running the {name} sub-protocol with K={K}")
        return {**state, "subprotocol": name, "K": K}


class CHSHGamesNode(Runnable):
    def invoke(self, state: Dict[str, Any], run_config: Dict[str, Any] = {}) -> Dict[str, Any]:
        cfg = state["cfg"]
        timeline = Timeline(cfg.q, cfg.n_s)
        try:
            records = sample_games(state["provers"].chsh, cfg.N * cfg.q * cfg.n_s, seed=state["seed"])
            timeline.add_chsh_sets(records)
            verdict = referee_verdict(records, cfg.N, cfg.q * cfg.n_s, seed=state["seed"])
        except LabError as e:
            return _failed(state, timeline, e)
        details = {"games_won": verdict.games_won, "threshold": verdict.threshold, "win_fraction": win_fraction(records)}
        return {**state, "K": cfg.N, "timeline": timeline, "accepted": verdict.accepted, "details": details}


class StateTomographyNode(Runnable):
    def invoke(self, state: Dict[str, Any], run_config: Dict[str, Any] = {}) -> Dict[str, Any]:
        cfg, provers = state["cfg"], state["provers"]
        qn = cfg.q * cfg.n_s
        timeline = _chsh_prefix(state, state["K"] - 1)
        try:
            run = run_state_tomography(provers.state_alice, provers.state_bob, cfg.q, cfg.n_s, m=qn, seed=state["seed"])
            verdict = product_tomography_verdict(run, gadget_basis())
        except LabError as e:
            return _failed(state, timeline, e)
        timeline.add_set(
            {i: ((run.alice_questions[i],), (run.alice_answers[i],)) for i in range(qn)},
            {j: (run.chunk(j), outcome_bits(int(run.bob_outcomes[j]))) for j in range(cfg.n_s)},
        )
        details = {
            "count_gap": verdict.count_gap, "count_threshold": verdict.count_threshold,
            "tau_gap": verdict.tau_gap, "tau_threshold": verdict.tau_threshold,
        }
        return {**state, "timeline": timeline, "accepted": verdict.accepted, "details": details}


class ProcessTomographyNode(Runnable):
    def invoke(self, state: Dict[str, Any], run_config: Dict[str, Any] = {}) -> Dict[str, Any]:
        cfg, provers = state["cfg"], state["provers"]
        qn = cfg.q * cfg.n_s
        timeline = _chsh_prefix(state, state["K"] - 1)
        try:
            run = run_process_tomography(
                provers.process_alice, provers.process_bob, BELL_STABILIZERS, cfg.n, m=qn, seed=state["seed"]
            )
            verdict = process_tomography_verdict(run, BELL_STABILIZERS)
        except LabError as e:
            return _failed(state, timeline, e)
        # Alice's first indices wait n_s rounds, as in the computation
        timeline.add_set(
            {cfg.n_s + j: (run.chunk(j), tuple(run.alice_syndromes[j])) for j in range(cfg.n)},
            {i: ((run.bob_questions[i],), (run.bob_answers[i],)) for i in range(qn)},
        )
        return {**state, "timeline": timeline, "accepted": verdict.accepted, "details": {"mismatches": verdict.mismatches}}


class ComputationNode(Runnable):
    def invoke(self, state: Dict[str, Any], run_config: Dict[str, Any] = {}) -> Dict[str, Any]:
        cfg = state["cfg"]
        timeline = _chsh_prefix(state, state["K"] - 1)
        try:
            result = run_computation(cfg, state["circuit"], state["provers"], seed=state["seed"])
        except LabError as e:
            return _failed(state, timeline, e)
        timeline.add_set(
            {cfg.n_s + t: (chunk, bits) for t, (chunk, bits) in enumerate(result.alice_rounds)},
            {j: (result.bob_chunk(j, cfg.q), outcome_bits(o)) for j, o in enumerate(result.bob_outcomes)},
        )
        readout = result.bits[state["circuit"].measured[0]]
        details = {"readout": readout, "blocks_used": len(result.blocks), "alice_rounds": len(result.alice_rounds)}
        return {**state, "timeline": timeline, "accepted": result.accepted, "details": details}


class VerdictNode(Runnable):
    def invoke(self, state: Dict[str, Any], run_config: Dict[str, Any] = {}) -> Dict[str, Any]:
        log = RunLog(
            subprotocol=state["subprotocol"],
            K=state["K"],
            seed=state["seed"],
            messages=state["timeline"].messages,
            accepted=state["accepted"],
            details={k: float(v) for k, v in state["details"].items()},
            error=state.get("error"),
        )
        if log.accepted:
            logger.info(f"✅ {log.subprotocol} sub-protocol accepted (seed {log.seed})")
        else:
            logger.info(f"❌ {log.subprotocol} sub-protocol rejected (seed {log.seed})")
        return {**state, "log": log}
