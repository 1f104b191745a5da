# graph.py

import logging
import math
from typing import Any, Callable, Dict, Iterable, List, Optional, TypedDict

from langchain_core.runnables import Runnable
from langgraph.graph import StateGraph

from chshlab.config import config
from chshlab.errors import CapacityError, ValidationError
from chshlab.schemas import SUBPROTOCOLS, PaperScale, ProtocolConfig, RunLog
from chshlab.teleport.circuit import Circuit
from chshlab.harness.computation import check_circuit
from chshlab.harness.devices import ProverPair
from chshlab.harness.nodes import (
    CHSHGamesNode,
    ChooseSubprotocolNode,
    ComputationNode,
    ProcessTomographyNode,
    StateTomographyNode,
    VerdictNode,
)
from chshlab.harness.timing import Timeline

logger = logging.getLogger("chshlab.harness.graph")


# State shared across the nodes of one protocol run
class HarnessState(TypedDict):
    cfg: ProtocolConfig
    circuit: Circuit
    provers: ProverPair
    seed: int
    forced: Optional[str]
    forced_K: Optional[int]
    subprotocol: Optional[str]
    K: Optional[int]
    timeline: Optional[Timeline]
    accepted: bool
    details: Dict[str, float]
    error: Optional[str]
    log: Optional[RunLog]


# Branch on the sub-protocol Eve drew
def route_by_subprotocol(state: HarnessState) -> str:
    return state["subprotocol"]


def build_protocol_graph() -> Runnable:
    graph = StateGraph(HarnessState)

    # Nodes
    graph.add_node("choose", ChooseSubprotocolNode())
    graph.add_node("chsh", CHSHGamesNode())
    graph.add_node("state", StateTomographyNode())
    graph.add_node("process", ProcessTomographyNode())
    graph.add_node("compute", ComputationNode())
    graph.add_node("verdict", VerdictNode())

    # Edges
    graph.set_entry_point("choose")
    graph.add_conditional_edges("choose", route_by_subprotocol)
    for name in SUBPROTOCOLS:
        graph.add_edge(name, "verdict")

    graph.set_finish_point("verdict")

    return graph.compile()


# Compiled once; every run goes through it
protocol_graph = build_protocol_graph()


def _initial_state(
    cfg: ProtocolConfig, circuit: Circuit, provers: ProverPair, seed: int,
    subprotocol: Optional[str] = None, K: Optional[int] = None,
) -> Dict[str, Any]:
    return {
        "cfg": cfg,
        "circuit": circuit,
        "provers": provers,
        "seed": seed,
        "forced": subprotocol,
        "forced_K": K,
        "subprotocol": None,
        "K": None,
        "timeline": None,
        "accepted": False,
        "details": {},
        "error": None,
        "log": None,
    }


def _check_run(cfg: ProtocolConfig, circuit: Circuit, subprotocol: Optional[str], K: Optional[int]) -> None:
    if cfg.paper_scale:
        raise CapacityError("paper-scale parameters can be printed but not simulated")
    check_circuit(cfg, circuit)
    if subprotocol is not None and subprotocol not in SUBPROTOCOLS:
        raise ValidationError(f"unknown sub-protocol '{subprotocol}', expected one of {SUBPROTOCOLS}")
    if K is not None and not 1 <= K <= cfg.N:
        raise ValidationError(f"K = {K} is not a set index in [1, {cfg.N}]")


def run_protocol(
    cfg: ProtocolConfig,
    circuit: Circuit,
    provers: Optional[ProverPair] = None,
    seed: Optional[int] = None,
    subprotocol: Optional[str] = None,
    K: Optional[int] = None,
) -> RunLog:
    """
    One run of the four-way protocol. `subprotocol` and `K` override Eve's draw, for
    comparing the sub-protocols at a fixed set index.
    """
    _check_run(cfg, circuit, subprotocol, K)
    seed = cfg.seed if seed is None else seed
    final = protocol_graph.invoke(_initial_state(cfg, circuit, provers or ProverPair.honest(), seed, subprotocol, K))
    return final["log"]


def run_batch(
    cfg: ProtocolConfig,
    circuit: Circuit,
    seeds: Iterable[int],
    provers: Callable[[], ProverPair] = ProverPair.honest,
    max_concurrency: int = 4,
) -> List[RunLog]:
    """Independent runs, one fresh prover pair each, executed concurrently; results ordered by seed."""
    _check_run(cfg, circuit, None, None)
    seeds = sorted(set(seeds))
    states = protocol_graph.batch(
        [_initial_state(cfg, circuit, provers(), seed) for seed in seeds],
        config={"max_concurrency": max_concurrency},
    )
    logs = [s["log"] for s in states]
    accepted = sum(log.accepted for log in logs)
    logger.info(f"📊 batch of {len(logs)} runs: {accepted} accepted")
    return logs


def paper_scale_parameters(n: int, alpha: float, q: int = 11) -> PaperScale:
    """
    The sizes the asymptotic analysis requires: n_s = n^(α/2), N ≥ (q·n_s)^(α−1),
    δ = 1/(6 n^(α/8)). Large values are returned as base-10 logarithms.
    """
    if n < 1 or alpha <= 0:
        raise ValidationError(f"need n ≥ 1 and α > 0, got n={n}, α={alpha}")
    log10_n_s = alpha / 2 * math.log10(n)
    log10_N_min = (alpha - 1) * (math.log10(q) + log10_n_s)
    scale = PaperScale(
        n=n,
        alpha=alpha,
        q=q,
        delta=1 / (6 * n ** (alpha / 8)),
        log10_n_s=log10_n_s,
        log10_N_min=log10_N_min,
        log10_games=log10_N_min + math.log10(q) + log10_n_s,
        alpha_min=16 * config.kappa_star ** 2,
    )
    logger.info(
        f"📐 paper scale for n={n}, α={alpha}: n_s = 10^{log10_n_s:.1f}, N ≥ 10^{log10_N_min:.1f}, δ = {scale.delta:.3e}"
    )
    return scale
