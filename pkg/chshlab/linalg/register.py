# register.py

"""
Labelled qubit register for protocol simulations.

Qubits are kept in independent groups; a group is merged with others only when an operation
touches qubits of several groups, so m EPR pairs cost m four-dimensional vectors until the
provers start acting jointly on them.
"""

import copy
import logging
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from chshlab.config import config
from chshlab.errors import CapacityError, DimensionError, ValidationError
from chshlab.linalg.operators import EPR, apply_local, as_state, dagger, permute_factors

logger = logging.getLogger("chshlab.linalg.register")

Label = Hashable


def reflection_projector(r: np.ndarray, answer: int) -> np.ndarray:
    """Projector onto the (−1)^answer eigenspace of a reflection."""
    return (np.eye(r.shape[0]) + (-1) ** answer * r) / 2


class QubitRegister:
    """Qubits keyed by label, stored as groups of jointly entangled qubits"""

    def __init__(self, cap: Optional[int] = None):
        self.cap = config.live_qubit_cap if cap is None else cap
        self._groups: Dict[int, Tuple[List[Label], np.ndarray]] = {}
        self._owner: Dict[Label, int] = {}
        self._next = 0

    def __contains__(self, label: Label) -> bool:
        return label in self._owner

    @property
    def labels(self) -> List[Label]:
        return list(self._owner)

    def group_sizes(self) -> List[int]:
        return [len(labels) for labels, _ in self._groups.values()]

    def add(self, labels: Sequence[Label], state: np.ndarray) -> None:
        labels = list(labels)
        if len(set(labels)) != len(labels) or any(l in self._owner for l in labels):
            raise ValidationError(f"qubit labels {labels} repeat or already exist")
        psi = as_state(state)
        if psi.size != 2 ** len(labels):
            raise DimensionError(f"{len(labels)} qubits need a vector of length {2 ** len(labels)}, got {psi.size}")
        gid = self._next
        self._next += 1
        self._groups[gid] = (labels, psi)
        for label in labels:
            self._owner[label] = gid

    def _merge(self, labels: Iterable[Label]) -> int:
        gids = []
        for label in labels:
            if label not in self._owner:
                raise ValidationError(f"unknown qubit {label!r}")
            gid = self._owner[label]
            if gid not in gids:
                gids.append(gid)
        if len(gids) == 1:
            return gids[0]
        size = sum(len(self._groups[g][0]) for g in gids)
        if size > self.cap:
            raise CapacityError(f"operation would entangle {size} qubits, the cap is {self.cap}")
        merged_labels: List[Label] = []
        psi = np.ones(1, dtype=complex)
        for g in gids:
            group_labels, v = self._groups.pop(g)
            merged_labels += group_labels
            psi = np.kron(psi, v)
        gid = gids[0]
        self._groups[gid] = (merged_labels, psi)
        for label in merged_labels:
            self._owner[label] = gid
        return gid

    def _locate(self, labels: Sequence[Label]) -> Tuple[int, List[int], List[int]]:
        gid = self._merge(labels)
        group_labels, _ = self._groups[gid]
        return gid, [group_labels.index(l) for l in labels], [2] * len(group_labels)

    def apply(self, labels: Sequence[Label], op: np.ndarray) -> None:
        gid, targets, dims = self._locate(labels)
        group_labels, psi = self._groups[gid]
        self._groups[gid] = (group_labels, apply_local(op, psi, dims, targets))

    def probabilities(self, labels: Sequence[Label], projectors: Sequence[np.ndarray]) -> np.ndarray:
        gid, targets, dims = self._locate(labels)
        psi = self._groups[gid][1]
        out = []
        for p in projectors:
            branch = apply_local(p, psi, dims, targets)
            out.append(float(np.vdot(branch, branch).real))
        return np.array(out)

    def project(self, labels: Sequence[Label], projector: np.ndarray) -> float:
        """Apply a projector and renormalize; returns the probability of the outcome."""
        gid, targets, dims = self._locate(labels)
        group_labels, psi = self._groups[gid]
        branch = apply_local(projector, psi, dims, targets)
        p = float(np.vdot(branch, branch).real)
        if p <= 1e-15:
            raise ValidationError(f"projection on {labels} has probability {p:.3g}")
        self._groups[gid] = (group_labels, branch / np.sqrt(p))
        return p

    def measure(self, labels: Sequence[Label], projectors: Sequence[np.ndarray], rng: np.random.Generator) -> int:
        """Complete projective measurement; returns the index of the observed projector."""
        p = self.probabilities(labels, projectors)
        if abs(p.sum() - 1) > 1e-9:
            raise ValidationError(f"projectors on {labels} are not complete (total {p.sum():.6f})")
        k = int(rng.choice(len(p), p=p / p.sum()))
        self.project(labels, projectors[k])
        return k

    def measure_reflections(
        self, labels: Sequence[Label], reflections: Sequence[np.ndarray], rng: np.random.Generator
    ) -> Tuple[int, ...]:
        """Measure commuting reflections one after another; bit 0 is the +1 outcome."""
        bits = []
        for r in reflections:
            bits.append(self.measure(labels, [reflection_projector(r, 0), reflection_projector(r, 1)], rng))
        return tuple(bits)

    def branches(self, labels: Sequence[Label], projectors: Sequence[np.ndarray], tol: float = 1e-12) -> List[Tuple[int, float, "QubitRegister"]]:
        """Every outcome with positive probability, each with its own collapsed copy."""
        p = self.probabilities(labels, projectors)
        out = []
        for k, pk in enumerate(p):
            if pk > tol:
                other = self.copy()
                other.project(labels, projectors[k])
                out.append((k, float(pk), other))
        return out

    def reduced(self, labels: Sequence[Label]) -> np.ndarray:
        """Density matrix of `labels`, factors in the given order."""
        gid, targets, dims = self._locate(labels)
        psi = self._groups[gid][1]
        rest = [i for i in range(len(dims)) if i not in targets]
        t = permute_factors(psi, dims, targets + rest).reshape(2 ** len(targets), -1)
        return t @ dagger(t)

    def release(self, labels: Sequence[Label], tol: float = 1e-9) -> np.ndarray:
        """
        Remove qubits that are in a pure state, unentangled from the rest; returns that state.
        """
        rho = self.reduced(labels)
        values, vectors = np.linalg.eigh(rho)
        if values[-1] < 1 - tol:
            raise ValidationError(f"qubits {labels} are entangled with the rest (purity {values[-1]:.6f})")
        v = vectors[:, -1]
        gid = self._owner[labels[0]]
        group_labels, psi = self._groups[gid]
        targets = [group_labels.index(l) for l in labels]
        rest = [i for i in range(len(group_labels)) if i not in targets]
        t = permute_factors(psi, [2] * len(group_labels), targets + rest).reshape(2 ** len(targets), -1)
        remaining = v.conj() @ t
        for label in labels:
            del self._owner[label]
        if rest:
            self._groups[gid] = ([group_labels[i] for i in rest], remaining / np.linalg.norm(remaining))
        else:
            del self._groups[gid]
        return v

    def copy(self) -> "QubitRegister":
        return copy.deepcopy(self)


def epr_register(indices: Iterable[int], alice: str = "A", bob: str = "B", cap: Optional[int] = None) -> QubitRegister:
    """One EPR pair (alice, j), (bob, j) for every index j."""
    register = QubitRegister(cap)
    for j in indices:
        register.add([(alice, j), (bob, j)], EPR)
    return register
