# equivalence.py

"""
Deferred decisions: Eve may steer Alice after Bob has reported, or Bob after Alice has.

In the protocol as run, Bob reports on his blocks first and Eve routes Alice's Bell measurements
through the Pauli frame. In the alternative ordering Alice acts first with fixed requests, always
teleporting through the I slot of a correction block; Eve later tells Bob to exchange the roles
of that block's I and H slots whenever the frame called for the H slot. For tiny circuits both
orderings are enumerated exactly and the joint distribution of (transcript, frame) together with
the unnormalized carried state must agree.

A noisy Bob reports honestly with probability 1 − p and uniformly at random otherwise. The
uniform branch leaves his halves unmeasured; nothing outside Bob's lab can tell the difference.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from chshlab.errors import CapacityError, ValidationError
from chshlab.linalg.operators import trace_norm
from chshlab.linalg.register import Label, QubitRegister, epr_register
from chshlab.rng import stream
from chshlab.schemas import ProtocolConfig, TranscriptComparison
from chshlab.teleport.circuit import Circuit
from chshlab.teleport.compiler import AdaptiveBranch, Prepare, TeleportSchedule, compile_circuit
from chshlab.teleport.executor import StepEngine, Track, advance_exact, bell_branches, forget_qubits, used_slots
from chshlab.teleport.resources import SLOT_ORDER, SLOT_POSITIONS, encode_outcome, slot_basis
from chshlab.harness.computation import Layout, sigma_layout
from chshlab.harness.devices import ProverPair

logger = logging.getLogger("chshlab.harness.equivalence")

EXACT_BRANCH_CAP = 200_000
EQUIVALENCE_TOLERANCE = 1e-9

Leaf = Tuple[float, QubitRegister, Track]
Distribution = Dict[Tuple, Tuple[float, np.ndarray]]


@dataclass
class Branch:
    """One enumerated history: its weight, the joint state and everything reported so far"""

    weight: float
    register: QubitRegister
    reports: Dict[int, Dict[str, int]] = field(default_factory=dict)
    outcomes: Dict[int, Tuple[int, ...]] = field(default_factory=dict)
    swapped: FrozenSet[int] = frozenset()


def swapped_layout(layout: Layout, swapped: FrozenSet[int]) -> Layout:
    """`layout` with positions 1-2 and 3-4 exchanged inside the swapped blocks."""
    if not swapped:
        return layout

    def moved(block: int, position: int) -> int:
        if block in swapped and 1 <= position <= 4:
            position = position + 2 if position <= 2 else position - 2
        return layout(block, position)

    return moved


def slot_register(schedule: TeleportSchedule, layout: Layout) -> QubitRegister:
    """EPR pairs on every position of every slot the schedule may draw on."""
    indices = []
    for block, slots in sorted(used_slots(schedule).items()):
        for slot in slots:
            indices += [layout(block, p) for p in SLOT_POSITIONS[slot]]
    return epr_register(indices)


def branch_estimate(schedule: TeleportSchedule, noise: float) -> int:
    """Upper bound on the number of leaves either ordering enumerates."""
    total = 4 ** schedule.bell_measurements()
    for slots in used_slots(schedule).values():
        total *= math.prod(len(slot_basis(s)) for s in slots) * (2 if 0 < noise < 1 else 1)
    return total


def _full_reports(reports: Dict[int, Dict[str, int]]) -> Dict[int, int]:
    # unused slots report digit 0 in both orderings
    return {b: encode_outcome({s: digits.get(s, 0) for s in SLOT_ORDER}) for b, digits in reports.items()}


def bob_block(branches: Iterable[Branch], block: int, slots: Tuple[str, ...], layout: Layout, noise: float) -> List[Branch]:
    """Bob's report on one block, slot by slot, under the noisy-report kernel."""
    out = []
    for branch in branches:
        where = swapped_layout(layout, branch.swapped)
        partial = []
        if noise < 1:
            partial = [(branch.weight * (1 - noise), branch.register, {})]
            for slot in slots:
                labels = [("B", where(block, p)) for p in SLOT_POSITIONS[slot]]
                deeper = []
                for w, register, digits in partial:
                    for d, p, child in register.branches(labels, slot_basis(slot).projectors()):
                        forget_qubits(child, labels)
                        deeper.append((w * p, child, {**digits, slot: d}))
                partial = deeper
        if noise > 0:
            combos = list(itertools.product(*(range(len(slot_basis(s))) for s in slots)))
            share = branch.weight * noise / len(combos)
            partial += [(share, branch.register, dict(zip(slots, combo))) for combo in combos]
        out += [
            replace(branch, weight=w, register=register, reports={**branch.reports, block: digits})
            for w, register, digits in partial
        ]
    return out


def bob_first(schedule: TeleportSchedule, layout: Layout, noise: float) -> List[Leaf]:
    """The protocol as run: Bob reports every block, then Alice follows the frame."""
    branches = [Branch(1.0, slot_register(schedule, layout))]
    for block, slots in sorted(used_slots(schedule).items()):
        branches = bob_block(branches, block, slots, layout, noise)

    leaves = []
    for branch in branches:
        engine = StepEngine(schedule, _full_reports(branch.reports), layout)
        steps = [(branch.weight, branch.register, engine.start())]
        for instruction in schedule.instructions:
            steps = advance_exact(engine, instruction, steps)
        leaves += steps
    return leaves


def alice_plan(schedule: TeleportSchedule, layout: Layout) -> List[List[Tuple[Label, Label]]]:
    """Alice's requests when she acts first; every correction block is entered through its I slot."""

    def alice(block: int, position: int) -> Label:
        return ("A", layout(block, position))

    carriers: Dict[int, Label] = {}
    plan = []
    for instruction in schedule.instructions:
        block = instruction.block
        if isinstance(instruction, Prepare):
            carriers[instruction.qubit] = alice(block, 0)
            plan.append([])
        elif isinstance(instruction, AdaptiveBranch):
            q = instruction.qubit
            plan.append([(carriers[q], alice(block, 1))])
            carriers[q] = alice(block, 2)
        elif instruction.slot == "readout":
            q = instruction.qubits[0]
            plan.append([(carriers.pop(q), alice(block, 0))])
        elif instruction.slot == "CNOT":
            c, t = instruction.qubits
            plan.append([(carriers[c], alice(block, 7)), (carriers[t], alice(block, 9))])
            carriers[c], carriers[t] = alice(block, 8), alice(block, 10)
        else:
            q = instruction.qubits[0]
            first, second = SLOT_POSITIONS[instruction.slot]
            plan.append([(carriers[q], alice(block, first))])
            carriers[q] = alice(block, second)
    return plan


def _replay(
    schedule: TeleportSchedule, branch: Branch, layout: Layout, plan: List[List[Tuple[Label, Label]]],
    upto: Optional[int] = None,
) -> Track:
    """Eve's track for a branch of the alternative ordering, through instruction `upto`."""
    engine = StepEngine(schedule, _full_reports(branch.reports), swapped_layout(layout, branch.swapped))
    track = engine.start()
    for i, instruction in enumerate(schedule.instructions[:upto]):
        if engine.requests(instruction, track) != plan[i]:
            raise ValidationError(f"instruction {i} touches different pairs in the two orderings")
        engine.update(instruction, track, branch.outcomes[i])
    return track


def alice_first(schedule: TeleportSchedule, layout: Layout, noise: float) -> List[Leaf]:
    """The alternative ordering: Alice's fixed requests, then Bob told which slots to swap."""
    plan = alice_plan(schedule, layout)
    branches = [Branch(1.0, slot_register(schedule, layout))]
    for i, pairs in enumerate(plan):
        branches = [
            replace(branch, weight=w, register=register, outcomes={**branch.outcomes, i: ks})
            for branch in branches
            for w, register, ks in bell_branches(branch.register, pairs, branch.weight)
        ]

    slots = used_slots(schedule)
    for i, instruction in enumerate(schedule.instructions):
        grown = []
        for branch in branches:
            if isinstance(instruction, AdaptiveBranch):
                track = _replay(schedule, branch, layout, plan, upto=i)
                if track.frame.hadamards[instruction.qubit]:
                    branch = replace(branch, swapped=branch.swapped | {instruction.block})
            grown += bob_block([branch], instruction.block, slots[instruction.block], layout, noise)
        branches = grown

    return [(b.weight, b.register, _replay(schedule, b, layout, plan)) for b in branches]


def transcript_states(leaves: Iterable[Leaf]) -> Distribution:
    """(transcript, frame) -> (probability, probability-weighted carried state)."""
    out: Distribution = {}
    for w, register, track in leaves:
        labels = [track.carriers[q] for q in sorted(track.carriers)]
        rho = register.reduced(labels) if labels else np.ones((1, 1), dtype=complex)
        key = (tuple(track.transcript), track.frame.key())
        p, acc = out.get(key, (0.0, 0))
        out[key] = (p + w, acc + w * rho)
    return out


def compare_distributions(first: Distribution, second: Distribution) -> Tuple[float, float, int]:
    """Total variation of the transcripts, worst trace-norm gap of the carried states, support size."""
    keys = set(first) | set(second)
    missing = (0.0, 0)
    tv = 0.5 * sum(abs(first.get(k, missing)[0] - second.get(k, missing)[0]) for k in keys)
    gap = max((trace_norm(first.get(k, missing)[1] - second.get(k, missing)[1]) for k in keys), default=0.0)
    return tv, gap, len(keys)


def adaptive_equivalence_test(
    cfg: ProtocolConfig, circuit: Circuit, provers: Optional[ProverPair] = None, seeds: Iterable[int] = (0,),
) -> TranscriptComparison:
    """
    Exact comparison of the two orderings for every layout Eve draws from `seeds`. The worst
    seed is reported.
    """
    provers = provers or ProverPair.honest()
    if not provers.honest_alice:
        raise ValidationError(f"exact enumeration needs an honest Alice, '{provers.name}' is not")
    schedule = compile_circuit(circuit)
    noise = provers.report_noise
    estimate = branch_estimate(schedule, noise)
    if estimate > EXACT_BRANCH_CAP:
        raise CapacityError(f"exact enumeration would need up to {estimate} branches, cap is {EXACT_BRANCH_CAP}")
    if schedule.blocks_used > cfg.n_s:
        raise ValidationError(f"circuit needs {schedule.blocks_used} blocks, a set has {cfg.n_s}")

    seeds = sorted(set(seeds))
    if not seeds:
        raise ValidationError("at least one seed is required")
    tv, gap, support = 0.0, 0.0, 0
    for seed in seeds:
        eve = stream(seed, "harness/equivalence")
        sigma = eve.permutation(cfg.q * cfg.n_s)
        blocks = sorted(int(j) for j in eve.choice(cfg.n_s, size=schedule.blocks_used, replace=False))
        layout = sigma_layout(sigma, blocks, cfg.q)
        first = transcript_states(bob_first(schedule, layout, noise))
        second = transcript_states(alice_first(schedule, layout, noise))
        seed_tv, seed_gap, seed_support = compare_distributions(first, second)
        logger.debug(f"🔁 seed {seed}: TV {seed_tv:.3g}, state gap {seed_gap:.3g} over {seed_support} transcripts")
        tv, gap, support = max(tv, seed_tv), max(gap, seed_gap), max(support, seed_support)

    equal = tv <= EQUIVALENCE_TOLERANCE and gap <= EQUIVALENCE_TOLERANCE
    comparison = TranscriptComparison(
        name=f"adaptive-alice vs adaptive-bob ({provers.name})",
        total_variation=tv,
        state_gap=gap,
        equal=equal,
        support=support,
    )
    if equal:
        logger.info(f"✅ orderings agree for {provers.name} provers over {len(seeds)} layouts")
    else:
        logger.warning(f"❌ orderings differ for {provers.name} provers: TV {tv:.3g}, state gap {gap:.3g}")
    return comparison
