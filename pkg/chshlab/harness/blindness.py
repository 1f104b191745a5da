# blindness.py

"""
Blindness: what one prover sees in the computation set must not depend on Eve's circuit.

A view is the canonical pattern of the indices a device was sent (indices relabelled by first
appearance) together with its replies. Only circuits with the same number of qubits and gates
are compared.

  exact    Alice's view is enumerated in the ordering where she acts first, decoys included.
           Bob's view is enumerated slot by slot on the state left behind by Alice's averaged
           operations; his halves stay in a product across rounds and slots, so the reported
           total variation sums per-slot distances and is zero exactly when the views agree.
  sampled  Full computation sets per circuit, then a chi-square test of homogeneity on the
           (round, reply) counts.
"""

import logging
from collections import Counter
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.stats import chi2_contingency

from chshlab.errors import CapacityError, ValidationError
from chshlab.linalg.operators import EPR
from chshlab.linalg.register import epr_register
from chshlab.rng import stream
from chshlab.schemas import ProtocolConfig, TranscriptComparison
from chshlab.teleport.circuit import Circuit
from chshlab.teleport.compiler import TeleportSchedule
from chshlab.teleport.executor import bell_branches, used_slots
from chshlab.teleport.resources import SLOT_ORDER, SLOT_POSITIONS, gadget_basis, slot_basis
from chshlab.tomography.state import HonestStateBob
from chshlab.harness.computation import Layout, check_circuit, run_computation, sigma_layout
from chshlab.harness.devices import ProverPair
from chshlab.harness.equivalence import EQUIVALENCE_TOLERANCE, EXACT_BRANCH_CAP, alice_plan, slot_register

logger = logging.getLogger("chshlab.harness.blindness")

DEVICES = ("A", "B")
SIGNIFICANCE = 0.01

SlotView = Dict[Tuple[int, str], np.ndarray]


def canonical_pattern(indices: Iterable[int]) -> Tuple[int, ...]:
    """Indices relabelled by order of first appearance."""
    first: Dict[int, int] = {}
    return tuple(first.setdefault(int(i), len(first)) for i in indices)


def _layout(cfg: ProtocolConfig, schedule: TeleportSchedule, seed: int) -> Tuple[np.ndarray, List[int], Layout]:
    eve = stream(seed, "harness/blindness/layout")
    sigma = eve.permutation(cfg.q * cfg.n_s)
    blocks = sorted(int(j) for j in eve.choice(cfg.n_s, size=schedule.blocks_used, replace=False))
    return sigma, blocks, sigma_layout(sigma, blocks, cfg.q)


def alice_view(cfg: ProtocolConfig, schedule: TeleportSchedule, seed: int = 0) -> Dict[Tuple, float]:
    """Exact distribution of (index pattern, Bell outcomes) over Alice's n rounds."""
    sigma, _, layout = _layout(cfg, schedule, seed)
    register = slot_register(schedule, layout)
    pairs = [pair for step in alice_plan(schedule, layout) for pair in step]

    # decoys go to pairs the schedule never touches
    taken = {label[1] for label in register.labels}
    spare = [int(i) for i in sigma if int(i) not in taken]
    decoys = cfg.n - len(pairs)
    if 2 * decoys > len(spare):
        raise CapacityError(f"{decoys} decoy rounds need {2 * decoys} free pairs, {len(spare)} are left")
    for t in range(decoys):
        a, b = spare[2 * t], spare[2 * t + 1]
        register.add([("A", a), ("B", a)], EPR)
        register.add([("A", b), ("B", b)], EPR)
        pairs.append((("A", a), ("A", b)))

    pattern = canonical_pattern(label[1] for pair in pairs for label in pair)
    view: Dict[Tuple, float] = {}
    for w, _, ks in bell_branches(register, pairs):
        view[(pattern, ks)] = view.get((pattern, ks), 0.0) + w
    return view


def _fresh_slot(slot: str) -> np.ndarray:
    positions = range(len(SLOT_POSITIONS[slot]))
    register = epr_register(positions)
    return register.probabilities([("B", p) for p in positions], slot_basis(slot).projectors())


def bob_view(cfg: ProtocolConfig, schedule: TeleportSchedule, noise: float = 0.0, seed: int = 0) -> SlotView:
    """Exact distribution of Bob's digit for every (round, slot), with the noisy-report kernel applied."""
    sigma, blocks, layout = _layout(cfg, schedule, seed)
    leaves = [(1.0, slot_register(schedule, layout))]
    for step in alice_plan(schedule, layout):
        leaves = [(w, child) for p, reg in leaves for w, child, _ in bell_branches(reg, step, p)]

    slots = used_slots(schedule)
    owner = {j: b for b, j in enumerate(blocks)}
    fresh = {slot: _fresh_slot(slot) for slot in SLOT_ORDER}
    view: SlotView = {}
    for j in range(cfg.n_s):
        chunk = sigma[j * cfg.q:(j + 1) * cfg.q]
        for slot in SLOT_ORDER:
            if j in owner and slot in slots[owner[j]]:
                labels = [("B", int(chunk[p])) for p in SLOT_POSITIONS[slot]]
                projectors = slot_basis(slot).projectors()
                dist = sum(w * reg.probabilities(labels, projectors) for w, reg in leaves)
            else:
                dist = fresh[slot]
            view[(j, slot)] = (1 - noise) * dist + noise / len(dist)
    return view


def _exact(
    cfg: ProtocolConfig, first: TeleportSchedule, second: TeleportSchedule, device: str,
    provers: ProverPair, seed: int,
) -> Tuple[float, int]:
    if device == "A":
        a, b = alice_view(cfg, first, seed), alice_view(cfg, second, seed)
        keys = set(a) | set(b)
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys), len(keys)
    a = bob_view(cfg, first, provers.report_noise, seed)
    b = bob_view(cfg, second, provers.report_noise, seed)
    tv = sum(0.5 * float(np.abs(a[k] - b[k]).sum()) for k in a)
    return tv, sum(len(v) for v in a.values())


def _cells(cfg: ProtocolConfig, circuit: Circuit, device: str, provers: Callable[[], ProverPair], seeds: np.ndarray) -> Counter:
    counts: Counter = Counter()
    for s in seeds:
        result = run_computation(cfg, circuit, provers(), seed=int(s))
        if device == "A":
            chunks = [chunk for chunk, _ in result.alice_rounds]
            counts[("pattern", canonical_pattern(i for chunk in chunks for i in chunk))] += 1
            for t, (_, bits) in enumerate(result.alice_rounds):
                counts[(t, bits)] += 1
        else:
            counts[("pattern", canonical_pattern(result.sigma))] += 1
            for j, o in enumerate(result.bob_outcomes):
                for slot, d in zip(SLOT_ORDER, gadget_basis().split(o)):
                    counts[(j, slot, d)] += 1
    return counts


def _sampled(
    cfg: ProtocolConfig, first: Circuit, second: Circuit, device: str,
    provers: Callable[[], ProverPair], trials: int, seed: int,
) -> Tuple[float, float, int]:
    a = _cells(cfg, first, device, provers, stream(seed, "harness/blindness/first").integers(2 ** 31, size=trials))
    b = _cells(cfg, second, device, provers, stream(seed, "harness/blindness/second").integers(2 ** 31, size=trials))
    keys = sorted(set(a) | set(b), key=repr)
    table = np.array([[a[k] for k in keys], [b[k] for k in keys]])
    tv = 0.5 * float(np.abs(table[0] / table[0].sum() - table[1] / table[1].sum()).sum())
    if len(keys) < 2:
        return tv, 1.0, len(keys)
    _, p_value, _, _ = chi2_contingency(table)
    return tv, float(p_value), len(keys)


def blindness_check(
    cfg: ProtocolConfig,
    circuit1: Circuit,
    circuit2: Circuit,
    device: str = "A",
    trials: int = 200,
    seed: int = 0,
    provers: Callable[[], ProverPair] = ProverPair.honest,
    mode: Optional[str] = None,
) -> TranscriptComparison:
    """
    Compare one device's view of the computation set under two circuits of equal size. `mode`
    defaults to exact when the enumeration fits, sampled otherwise.
    """
    if device not in DEVICES:
        raise ValidationError(f"device must be one of {DEVICES}, got '{device}'")
    if (circuit1.n_qubits, circuit1.size) != (circuit2.n_qubits, circuit2.size):
        raise ValidationError(
            f"blindness compares circuits of equal size, got {circuit1.n_qubits} qubits / {circuit1.size} gates "
            f"and {circuit2.n_qubits} qubits / {circuit2.size} gates"
        )
    first, second = check_circuit(cfg, circuit1), check_circuit(cfg, circuit2)
    pair = provers()
    exact_fits = (
        pair.honest_alice
        and isinstance(pair.state_bob, HonestStateBob)
        and 4 ** cfg.n <= EXACT_BRANCH_CAP
    )
    mode = mode or ("exact" if exact_fits else "sampled")

    if mode == "exact":
        if not exact_fits:
            raise CapacityError(f"exact blindness needs honest-basis devices and 4^n ≤ {EXACT_BRANCH_CAP}")
        tv, support = _exact(cfg, first, second, device, pair, seed)
        p_value = None
        equal = tv <= EQUIVALENCE_TOLERANCE
    elif mode == "sampled":
        if trials < 1:
            raise ValidationError(f"trials must be positive, got {trials}")
        tv, p_value, support = _sampled(cfg, circuit1, circuit2, device, provers, trials, seed)
        equal = p_value > SIGNIFICANCE
    else:
        raise ValidationError(f"unknown blindness mode '{mode}'")

    comparison = TranscriptComparison(
        name=f"blindness of {device}", mode=mode, total_variation=tv, p_value=p_value, equal=equal, support=support
    )
    if equal:
        logger.info(f"🙈 {device}'s view does not depend on the circuit ({mode}, TV {tv:.3g})")
    else:
        logger.warning(f"👀 {device}'s view depends on the circuit ({mode}, TV {tv:.3g}, p={p_value})")
    return comparison
