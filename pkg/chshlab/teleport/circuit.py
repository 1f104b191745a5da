# circuit.py

"""
Circuits over {H, G, CNOT} acting on |0…0⟩, their text format and a dense reference simulator.

Text format, one instruction per line ('#' starts a comment):

    qubits 2
    G 0
    CNOT 0 1
    measure all

The trailer may also list the measured qubits explicitly ("measure 1 0").
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from chshlab.config import config
from chshlab.errors import CapacityError, CircuitSyntaxError, ValidationError
from chshlab.linalg.operators import CNOT, G, H, apply_local

logger = logging.getLogger("chshlab.teleport.circuit")

GATE_ARITY: Dict[str, int] = {"H": 1, "G": 1, "CNOT": 2}
GATE_MATRICES: Dict[str, np.ndarray] = {"H": H, "G": G, "CNOT": CNOT}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: Tuple[int, ...]

    def __str__(self) -> str:
        return " ".join([self.kind, *map(str, self.targets)])


@dataclass(frozen=True)
class Circuit:
    """Gates applied in order to |0…0⟩, then the measured qubits read out in the given order"""

    n_qubits: int
    gates: Tuple[Gate, ...] = ()
    measured: Optional[Tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValidationError("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            _check_gate(gate, self.n_qubits)
        measured = tuple(range(self.n_qubits)) if self.measured is None else tuple(self.measured)
        if len(set(measured)) != len(measured) or any(not 0 <= t < self.n_qubits for t in measured):
            raise ValidationError(f"measured qubits {measured} are not distinct indices below {self.n_qubits}")
        object.__setattr__(self, "measured", measured)

    @classmethod
    def build(cls, n_qubits: int, *gates: Sequence, measured: Optional[Sequence[int]] = None) -> "Circuit":
        """Circuit.build(2, ("G", 0), ("CNOT", 0, 1))"""
        parsed = tuple(Gate(g[0], tuple(g[1:])) for g in gates)
        return cls(n_qubits, parsed, None if measured is None else tuple(measured))

    @property
    def size(self) -> int:
        return len(self.gates)

    def counts(self) -> Dict[str, int]:
        out = {kind: 0 for kind in GATE_ARITY}
        for gate in self.gates:
            out[gate.kind] += 1
        return out


def _check_gate(gate: Gate, n_qubits: int) -> None:
    if gate.kind not in GATE_ARITY:
        raise ValidationError(f"unknown gate '{gate.kind}'")
    if len(gate.targets) != GATE_ARITY[gate.kind]:
        raise ValidationError(f"{gate.kind} takes {GATE_ARITY[gate.kind]} target(s), got {len(gate.targets)}")
    if any(not 0 <= t < n_qubits for t in gate.targets):
        raise ValidationError(f"gate {gate} addresses a qubit outside 0..{n_qubits - 1}")
    if len(set(gate.targets)) != len(gate.targets):
        raise ValidationError(f"gate {gate} repeats a target")


# --- text format ---
def _tokens(line: str) -> List[Tuple[str, int]]:
    """Whitespace-separated tokens with their 1-based columns, comments removed."""
    body = line.split("#", 1)[0]
    out, i = [], 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        start = i
        while i < len(body) and not body[i].isspace():
            i += 1
        out.append((body[start:i], start + 1))
    return out


def _index(token: str, column: int, line: int, n_qubits: int) -> int:
    if not token.isdigit():
        raise CircuitSyntaxError(f"expected a qubit index, got '{token}'", line, column)
    value = int(token)
    if value >= n_qubits:
        raise CircuitSyntaxError(f"qubit {value} is out of range for {n_qubits} qubits", line, column)
    return value


def parse_circuit(text: str) -> Circuit:
    lines = text.splitlines()
    n_qubits: Optional[int] = None
    gates: List[Gate] = []
    measured: Optional[Tuple[int, ...]] = None
    last = 0

    for number, raw in enumerate(lines, start=1):
        tokens = _tokens(raw)
        if not tokens:
            continue
        last = number
        word, column = tokens[0]
        if measured is not None:
            raise CircuitSyntaxError("nothing may follow the measure line", number, column)

        if n_qubits is None:
            if word != "qubits":
                raise CircuitSyntaxError("the first line must be 'qubits N'", number, column)
            if len(tokens) != 2 or not tokens[1][0].isdigit() or int(tokens[1][0]) < 1:
                at = tokens[1][1] if len(tokens) > 1 else column + len(word)
                raise CircuitSyntaxError("'qubits' takes one positive integer", number, at)
            n_qubits = int(tokens[1][0])
            continue

        if word == "measure":
            rest = tokens[1:]
            if len(rest) == 1 and rest[0][0] == "all":
                measured = tuple(range(n_qubits))
            elif len(rest) == 1 and rest[0][0] == "none":
                measured = ()
            elif rest:
                measured = tuple(_index(t, c, number, n_qubits) for t, c in rest)
                if len(set(measured)) != len(measured):
                    raise CircuitSyntaxError("a qubit is measured twice", number, rest[0][1])
            else:
                raise CircuitSyntaxError("'measure' needs 'all', 'none' or qubit indices", number, column + len(word))
            continue

        if word not in GATE_ARITY:
            raise CircuitSyntaxError(f"unknown gate '{word}'", number, column)
        args = tokens[1:]
        if len(args) != GATE_ARITY[word]:
            raise CircuitSyntaxError(f"{word} takes {GATE_ARITY[word]} qubit(s), got {len(args)}", number, column)
        targets = tuple(_index(t, c, number, n_qubits) for t, c in args)
        if len(set(targets)) != len(targets):
            raise CircuitSyntaxError(f"{word} needs distinct qubits", number, args[1][1])
        gates.append(Gate(word, targets))

    if n_qubits is None:
        raise CircuitSyntaxError("missing 'qubits N' header", max(last, 1), 1)
    if measured is None:
        raise CircuitSyntaxError("missing 'measure' trailer", last + 1, 1)
    return Circuit(n_qubits, tuple(gates), measured)


def format_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_qubits}"]
    lines += [str(g) for g in circuit.gates]
    if not circuit.measured:
        lines.append("measure none")
    elif circuit.measured == tuple(range(circuit.n_qubits)):
        lines.append("measure all")
    else:
        lines.append("measure " + " ".join(map(str, circuit.measured)))
    return "\n".join(lines) + "\n"


def random_circuit(
    n_qubits: int, n_gates: int, rng: np.random.Generator, kinds: Iterable[str] = ("H", "G", "CNOT")
) -> Circuit:
    kinds = [k for k in kinds if k != "CNOT" or n_qubits >= 2]
    if not kinds:
        raise ValidationError("no usable gate kinds for this width")
    gates = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        targets = rng.choice(n_qubits, size=GATE_ARITY[kind], replace=False)
        gates.append(Gate(kind, tuple(int(t) for t in targets)))
    return Circuit(n_qubits, tuple(gates))


def all_circuits(n_qubits: int, max_gates: int, kinds: Sequence[str] = ("H", "G")) -> List[Circuit]:
    """Every circuit with at most max_gates gates drawn from `kinds`."""
    choices = []
    for kind in kinds:
        for targets in itertools.permutations(range(n_qubits), GATE_ARITY[kind]):
            choices.append(Gate(kind, targets))
    out = []
    for size in range(max_gates + 1):
        for gates in itertools.product(choices, repeat=size):
            out.append(Circuit(n_qubits, gates))
    return out


# --- reference simulation ---
def final_state(circuit: Circuit) -> np.ndarray:
    if circuit.n_qubits > config.dense_qubit_cap:
        raise CapacityError(f"{circuit.n_qubits} qubits exceed the dense cap of {config.dense_qubit_cap}")
    dims = [2] * circuit.n_qubits
    psi = np.zeros(2 ** circuit.n_qubits, dtype=complex)
    psi[0] = 1
    for gate in circuit.gates:
        psi = apply_local(GATE_MATRICES[gate.kind], psi, dims, list(gate.targets))
    return psi


def direct_simulate(circuit: Circuit) -> Dict[str, float]:
    """Exact output distribution; keys are bit strings over the measured qubits in order."""
    psi = final_state(circuit)
    probs = (np.abs(psi) ** 2).reshape([2] * circuit.n_qubits)
    rest = tuple(i for i in range(circuit.n_qubits) if i not in circuit.measured)
    marginal = probs.sum(axis=rest) if rest else probs
    order = sorted(circuit.measured)
    marginal = np.transpose(marginal, [order.index(t) for t in circuit.measured])
    out = {}
    for bits in itertools.product((0, 1), repeat=len(circuit.measured)):
        p = float(marginal[bits])
        if p > 1e-15:
            out["".join(map(str, bits))] = p
    return out


def total_variation(p: Dict[str, float], q: Dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)

