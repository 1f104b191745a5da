# main.py

"""
Command-line entry point.

    python -m chshlab.main chsh --ideal
    python -m chshlab.main sequential --adversary classical --games 10000 --seed 7
    python -m chshlab.main protocol --config lab.cfg --out run.log

Exit status: 0 accepted / succeeded, 1 rejected, 2 usage, validation, capacity or config error.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from chshlab.chsh import (
    anti_ideal_strategy, classical_strategy, correlation_value, ideal_chsh_strategy, rigidity_analyze,
    rotated_bob_strategy, win_probability,
)
from chshlab.config import config, lab_config, lab_settings, load_config_file, protocol_config
from chshlab.errors import ConfigError, LabError
from chshlab.harness import (
    BELL_STABILIZERS, ProverPair, adaptive_equivalence_test, blindness_check, paper_scale_parameters,
    run_batch, run_protocol,
)
from chshlab.linalg.operators import I2, KET0, Y, outer
from chshlab.logging_setup import configure_logging
from chshlab.schemas import SUBPROTOCOLS
from chshlab.sequential import ADVERSARIES, adversary, referee_verdict, sample_games
from chshlab.teleport import Circuit, equivalence_check, execute, parse_circuit
from chshlab.teleport.resources import gadget_basis
from chshlab.tomography import (
    FlipSyndromeAlice, HonestProcessAlice, HonestStateBob, IdealProcessBob, IdealStateAlice, NoisyStateBob,
    ShiftedAlice, process_tomography_verdict, product_tomography_verdict, run_process_tomography,
    run_state_tomography, xz_determination_probe,
)

logger = logging.getLogger("chshlab.main")

EXIT_ACCEPT = 0
EXIT_REJECT = 1
EXIT_USAGE = 2

# G rotates by π/8; four of them read out 1 with certainty
DEFAULT_CIRCUIT = "qubits 1\nG 0\nG 0\nG 0\nG 0\nmeasure all\n"

_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
PROBE_STATES: Dict[str, Callable[[], np.ndarray]] = {
    "plus": lambda: outer(_PLUS),
    "y": lambda: (I2 + Y) / 2,
    "xz-mixed": lambda: (outer(np.kron(KET0, _PLUS)) + outer(np.kron(_PLUS, KET0))) / 2,
}

PROVERS: Dict[str, Callable[[float], ProverPair]] = {
    "honest": lambda p: ProverPair.honest(),
    "noisy-bob": ProverPair.noisy_bob,
    "qubit-shift-alice": lambda p: ProverPair.qubit_shift_alice(),
}


@dataclass
class Outcome:
    """What a command produced: its verdict, a JSON payload, text for the terminal, log lines for --out"""

    accepted: bool
    payload: Dict[str, Any]
    text: List[str] = field(default_factory=list)
    log_lines: List[str] = field(default_factory=list)


def _load_circuit(path: Optional[str]) -> Circuit:
    if path is None:
        return parse_circuit(DEFAULT_CIRCUIT)
    try:
        return parse_circuit(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read circuit file {path}: {e}") from e


# --- Commands ---
def cmd_chsh(args: argparse.Namespace) -> Outcome:
    if args.classical:
        strategy = classical_strategy()
    elif args.anti:
        strategy = anti_ideal_strategy()
    elif args.rotate is not None:
        strategy = rotated_bob_strategy(args.rotate)
    else:
        strategy = ideal_chsh_strategy()
    report = rigidity_analyze(strategy)
    correlation, win = correlation_value(strategy), win_probability(strategy)
    payload = {"correlation": correlation, "win_probability": win, "rigidity": report.model_dump()}
    text = [
        f"correlation {correlation:.6f}",
        f"win probability {win:.6f}",
        f"ε {report.epsilon:.3e}, M residual {report.m_residual:.3e}, state residual {report.state_residual:.3e}",
    ]
    return Outcome(True, payload, text)


def cmd_sequential(args: argparse.Namespace) -> Outcome:
    if args.games % args.sets:
        raise ConfigError(f"{args.games} games cannot be split into {args.sets} equal sets")
    source = adversary(args.adversary, args.rounds)
    records = sample_games(source, args.games, seed=args.seed)
    verdict = referee_verdict(records, args.sets, args.games // args.sets, seed=args.seed)
    text = [
        f"{args.adversary}: won {verdict.games_won}/{verdict.games} games, threshold {verdict.threshold:.1f}",
        "accepted" if verdict.accepted else "rejected",
    ]
    return Outcome(verdict.accepted, verdict.model_dump(), text, [r.line() for r in records])


def cmd_tomography_state(args: argparse.Namespace) -> Outcome:
    basis = gadget_basis()
    bob = NoisyStateBob(basis, args.noise) if args.noise else HonestStateBob(basis)
    run = run_state_tomography(IdealStateAlice(), bob, basis.q, args.n, seed=args.seed)
    verdict = product_tomography_verdict(run, basis)
    text = [
        f"count gap {verdict.count_gap:.3g} (threshold {verdict.count_threshold:.3g})",
        f"τ gap {verdict.tau_gap:.3g} (threshold {verdict.tau_threshold:.3g})",
        "accepted" if verdict.accepted else "rejected",
    ]
    return Outcome(verdict.accepted, verdict.model_dump(), text, [r.line() for r in run.records()])


def cmd_tomography_process(args: argparse.Namespace) -> Outcome:
    alice = {
        "honest": HonestProcessAlice,
        "shift": ShiftedAlice,
        "flip": FlipSyndromeAlice,
    }[args.alice]()
    run = run_process_tomography(alice, IdealProcessBob(), BELL_STABILIZERS, args.n, seed=args.seed)
    verdict = process_tomography_verdict(run, BELL_STABILIZERS)
    text = [f"{verdict.mismatches} mismatched syndromes", "accepted" if verdict.accepted else "rejected"]
    return Outcome(verdict.accepted, verdict.model_dump(), text, [r.line() for r in run.records()])


def cmd_compute(args: argparse.Namespace) -> Outcome:
    circuit = _load_circuit(args.circuit)
    result = execute(circuit, seed=args.seed)
    report = equivalence_check(circuit, samples=args.samples, seed=args.seed, mode=args.mode)
    text = [
        f"output {result.output} using {result.blocks_used} blocks",
        f"teleported vs direct ({report.mode}): TV {report.total_variation:.3g}, tolerance {report.tolerance:.3g}",
        "equivalent" if report.passed else "not equivalent",
    ]
    payload = {"output": result.output, "blocks_used": result.blocks_used, "equivalence": report.model_dump()}
    return Outcome(report.passed, payload, text)


def cmd_protocol(args: argparse.Namespace) -> Outcome:
    cfg = args.cfg
    if args.paper_scale:
        scale = paper_scale_parameters(cfg.n, cfg.alpha, cfg.q)
        text = [
            f"n = {scale.n}, α = {scale.alpha:g} (α ≥ {scale.alpha_min:g} needed)",
            f"n_s = 10^{scale.log10_n_s:.1f}, N ≥ 10^{scale.log10_N_min:.1f}, games ≈ 10^{scale.log10_games:.1f}",
            f"δ = {scale.delta:.3e}",
        ]
        return Outcome(True, scale.model_dump(), text)

    circuit = _load_circuit(args.circuit)
    provers = PROVERS[args.provers]
    if args.equivalence:
        report = adaptive_equivalence_test(cfg, circuit, provers(args.noise), seeds=range(cfg.seed, cfg.seed + args.runs))
        text = [f"orderings: TV {report.total_variation:.3g}, state gap {report.state_gap:.3g}"]
        return Outcome(report.equal, report.model_dump(), text)
    if args.blindness:
        other = _load_circuit(args.against)
        report = blindness_check(cfg, circuit, other, args.blindness, args.trials, cfg.seed, lambda: provers(args.noise))
        p = "" if report.p_value is None else f", p = {report.p_value:.3g}"
        text = [f"{args.blindness}'s view ({report.mode}): TV {report.total_variation:.3g}{p}"]
        return Outcome(report.equal, report.model_dump(), text)

    if args.runs == 1:
        log = run_protocol(cfg, circuit, provers(args.noise), cfg.seed, args.subprotocol, args.K)
        text = [f"{log.subprotocol} sub-protocol, K={log.K}: {'accepted' if log.accepted else 'rejected'}"]
        return Outcome(log.accepted, log.model_dump(exclude={"messages"}), text, log.lines())

    logs = run_batch(cfg, circuit, range(cfg.seed, cfg.seed + args.runs), lambda: provers(args.noise))
    accepted = sum(log.accepted for log in logs)
    lines = [f"seed={log.seed} subprotocol={log.subprotocol} K={log.K} accepted={int(log.accepted)}" for log in logs]
    payload = {"runs": len(logs), "accepted": accepted, "logs": [log.model_dump(exclude={"messages"}) for log in logs]}
    return Outcome(accepted == len(logs), payload, [f"{accepted}/{len(logs)} runs accepted"], lines)


def cmd_probe_xz(args: argparse.Namespace) -> Outcome:
    try:
        eps_grid = [float(e) for e in args.eps.split(",")]
    except ValueError as e:
        raise ConfigError(f"bad ε grid '{args.eps}'") from e
    report = xz_determination_probe(PROBE_STATES[args.state](), eps_grid, trials=args.trials, seed=args.seed)
    text = [f"ε={p.eps:g}: largest distance {p.max_distance:.3g}" for p in report.points]
    if report.exponent is not None:
        text.append(f"empirical exponent {report.exponent:.3g}")
    determined = not any(p.witness_found for p in report.points if p.eps == 0)
    return Outcome(determined, report.model_dump(), text)


# --- Parser ---
def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="overrides the configured seed")
    common.add_argument("--config", help="flat key=value configuration file")
    common.add_argument("--out", help="write the run's line-delimited records here")
    common.add_argument("--json", action="store_true", help="print a machine-readable report")

    parser = argparse.ArgumentParser(prog="chshlab", description="CHSH rigidity and verified-computation lab")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("chsh", parents=[common], help="single-game analysis")
    choice = p.add_mutually_exclusive_group()
    choice.add_argument("--ideal", action="store_true")
    choice.add_argument("--classical", action="store_true")
    choice.add_argument("--anti", action="store_true")
    choice.add_argument("--rotate", type=float, metavar="PHI")
    p.set_defaults(handler=cmd_chsh)

    p = commands.add_parser("sequential", parents=[common], help="refereed sequential games")
    p.add_argument("--adversary", choices=sorted(ADVERSARIES), default="honest")
    p.add_argument("--games", type=int, default=10_000)
    p.add_argument("--sets", type=int, default=1)
    p.add_argument("--rounds", type=int, default=3, help="games per replayed strategy")
    p.set_defaults(handler=cmd_sequential)

    p = commands.add_parser("tomography-state", parents=[common], help="gadget-basis state tomography")
    p.add_argument("--n", type=int, default=config.default_rounds)
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(handler=cmd_tomography_state)

    p = commands.add_parser("tomography-process", parents=[common], help="Bell-measurement process tomography")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--alice", choices=["honest", "shift", "flip"], default="honest")
    p.set_defaults(handler=cmd_tomography_process)

    p = commands.add_parser("compute", parents=[common], help="teleported execution against direct simulation")
    p.add_argument("--circuit", help="circuit file; four G gates on one qubit by default")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--mode", choices=["exact", "sampled"])
    p.set_defaults(handler=cmd_compute)

    p = commands.add_parser("protocol", parents=[common], help="the four-way protocol")
    p.add_argument("--circuit", help="circuit file; four G gates on one qubit by default")
    p.add_argument("--provers", choices=sorted(PROVERS), default="honest")
    p.add_argument("--noise", type=float, default=0.1, help="noise of the noisy-bob provers")
    p.add_argument("--subprotocol", choices=SUBPROTOCOLS)
    p.add_argument("--K", type=int)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--paper-scale", action="store_true", help="print the asymptotic parameter sizes and exit")
    p.add_argument("--equivalence", action="store_true", help="compare the two prover orderings exactly")
    p.add_argument("--blindness", choices=["A", "B"], help="compare a device's view against --against")
    p.add_argument("--against", help="second circuit file for --blindness")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(handler=cmd_protocol)

    p = commands.add_parser("probe-xz", parents=[common], help="XZ-determination probe")
    p.add_argument("--state", choices=sorted(PROBE_STATES), default="xz-mixed")
    p.add_argument("--eps", default="0,0.01,0.05")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(handler=cmd_probe_xz)

    return parser


def _emit(args: argparse.Namespace, outcome: Outcome) -> None:
    if args.json:
        print(json.dumps({"accepted": outcome.accepted, **outcome.payload}, indent=2, default=float))
    else:
        for line in outcome.text:
            print(line)
    if args.out:
        try:
            Path(args.out).write_text("".join(line + "\n" for line in outcome.log_lines), encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"cannot write {args.out}: {e}") from e


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ACCEPT if e.code == 0 else EXIT_USAGE

    configure_logging(config.log_level)
    try:
        values = load_config_file(args.config)
        args.cfg = protocol_config(values, seed=args.seed)
        args.seed = args.cfg.seed
        # LabConfig keys in the file apply to every command, for this call only
        with lab_settings(lab_config(values)):
            configure_logging(config.log_level)
            outcome = args.handler(args)
            _emit(args, outcome)
    except ConfigError as e:
        logger.error(f"❌ configuration error: {e}")
        return EXIT_USAGE
    except LabError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_USAGE

    return EXIT_ACCEPT if outcome.accepted else EXIT_REJECT


if __name__ == "__main__":
    sys.exit(main())
