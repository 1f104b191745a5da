# xz.py

"""
States that are pinned down by their X/Z Pauli coordinates.

A q-qubit state is XZ-determined when every state with the same coordinates Tr(ρP),
P ∈ {I, X, Z}^q, is close to it. This module holds the bases used by the tomography
protocols, the closure constructions, and the stabilizer sets checked by process tomography.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from chshlab.config import config
from chshlab.errors import DimensionError, ValidationError
from chshlab.linalg.operators import CNOT, EPR, I2, KET0, KET1, X, Y, Z, apply_local, as_square, is_unitary, kron, outer, permute_factors
from chshlab.linalg.pauli import PauliString, all_strings, identify_pauli

logger = logging.getLogger("chshlab.tomography.xz")

XZ_LETTERS = "IXZ"
BELL_PAULIS = (I2, X, Z, Y)


def xz_strings(q: int) -> List[PauliString]:
    """The 3^q strings over I, X, Z in lexicographic order (I < X < Z)."""
    return list(all_strings(q, XZ_LETTERS))


def pauli_coordinate(rho: np.ndarray, p: Union[PauliString, np.ndarray]) -> float:
    """Tr(ρP)."""
    rho = as_square(rho)
    m = p.matrix() if isinstance(p, PauliString) else as_square(p)
    if m.shape != rho.shape:
        raise DimensionError(f"operator of shape {m.shape} does not match state of shape {rho.shape}")
    return float(np.trace(rho @ m).real)


def real_phase(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Multiply `v` by the global phase that makes it real; ValidationError if none does."""
    v = np.asarray(v, dtype=complex).reshape(-1)
    k = int(np.argmax(np.abs(v)))
    fixed = v * np.exp(-1j * np.angle(v[k]))
    if np.max(np.abs(fixed.imag)) > tol:
        raise ValidationError("state has no real representative up to a global phase")
    return fixed.real.astype(complex)


@dataclass(frozen=True, eq=False)
class XZBasisSet:
    """A complete orthonormal set of 2^q real-amplitude q-qubit states, outcome o ↔ states[o]"""

    q: int
    states: Tuple[np.ndarray, ...]
    name: str = "custom"
    exponent_hint: Optional[float] = None

    def __post_init__(self) -> None:
        dim = 2 ** self.q
        if len(self.states) != dim:
            raise DimensionError(f"a {self.q}-qubit basis needs {dim} states, got {len(self.states)}")
        fixed = []
        for k, v in enumerate(self.states):
            v = np.asarray(v, dtype=complex).reshape(-1)
            if v.size != dim:
                raise DimensionError(f"basis state {k} has length {v.size}, expected {dim}")
            try:
                fixed.append(real_phase(v))
            except ValidationError as e:
                raise ValidationError(f"basis state {k}: {e}") from e
        m = np.stack(fixed, axis=1)
        if not np.allclose(m.conj().T @ m, np.eye(dim), atol=config.validation_tol):
            raise ValidationError(f"basis '{self.name}' is not orthonormal")
        object.__setattr__(self, "states", tuple(fixed))

    def __len__(self) -> int:
        return len(self.states)

    def projector(self, o: int) -> np.ndarray:
        return outer(self.states[o])

    def projectors(self) -> List[np.ndarray]:
        return [outer(v) for v in self.states]

    def coordinate(self, o: int, p: PauliString) -> float:
        return pauli_coordinate(self.projector(o), p)


def stabilizer_xz_basis(kind: str, u: Optional[np.ndarray] = None) -> XZBasisSet:
    """
    Built-in XZ-determined bases.

    - "computational": {|0⟩, |1⟩}
    - "bell-real": {(U⊗P)|EPR⟩ : P = I, X, Z, Y} for a real one-qubit unitary U (default I)
    - "double-bell-cnot": {(P⊗CNOT)(EPR on qubits 1,3 ⊗ EPR on qubits 2,4) : P ∈ Pauli²},
      ordered by the Bell labels of the two factors of P
    """
    if kind == "computational":
        return XZBasisSet(1, (KET0, KET1), kind)
    if kind == "bell-real":
        u = I2 if u is None else np.asarray(u, dtype=complex)
        if u.shape != (2, 2) or not is_unitary(u) or np.max(np.abs(u.imag)) > config.validation_tol:
            raise ValidationError("bell-real basis needs a real one-qubit unitary")
        return XZBasisSet(2, tuple(kron(u, p) @ EPR for p in BELL_PAULIS), kind)
    if kind == "double-bell-cnot":
        base = permute_factors(np.kron(EPR, EPR), [2, 2, 2, 2], [0, 2, 1, 3])
        states = tuple(
            kron(p1, p2, CNOT) @ base for p1 in BELL_PAULIS for p2 in BELL_PAULIS
        )
        return XZBasisSet(4, states, kind)
    raise ValidationError(f"unknown basis kind '{kind}', choose computational, bell-real or double-bell-cnot")


# --- Closure constructions ---
@dataclass(frozen=True, eq=False)
class ClosureResult:
    """A constructed state or basis together with the closure rule that keeps it determined"""

    result: Union[XZBasisSet, np.ndarray]
    rule: str


def closure_tensor(a: Union[XZBasisSet, np.ndarray], b: Union[XZBasisSet, np.ndarray]) -> ClosureResult:
    """Tensor product of two determined pure states or two determined bases."""
    if isinstance(a, XZBasisSet) and isinstance(b, XZBasisSet):
        states = tuple(np.kron(va, vb) for va in a.states for vb in b.states)
        return ClosureResult(XZBasisSet(a.q + b.q, states, f"{a.name}*{b.name}"), "tensor")
    if isinstance(a, XZBasisSet) or isinstance(b, XZBasisSet):
        raise ValidationError("closure_tensor combines two states or two bases, not one of each")
    return ClosureResult(np.kron(real_phase(a), real_phase(b)), "tensor")


def is_css(psi: np.ndarray, tol: float = 1e-9) -> bool:
    """True when ψ is stabilized, up to sign, by 2^n strings X^a Z^b with a from {I,X}^n, b from {I,Z}^n."""
    n = int(round(np.log2(psi.size)))
    rho = outer(psi)
    xs = sum(1 for p in all_strings(n, "IX") if abs(abs(pauli_coordinate(rho, p)) - 1) < tol)
    zs = sum(1 for p in all_strings(n, "IZ") if abs(abs(pauli_coordinate(rho, p)) - 1) < tol)
    return xs * zs == 2 ** n


def _conjugation_rule(u: np.ndarray, states: Sequence[np.ndarray]) -> str:
    tol = config.validation_tol
    if not is_unitary(u):
        raise ValidationError("conjugating operator is not unitary")
    if u.shape == (2, 2):
        if identify_pauli(u) is not None:
            return "pauli"
        k = int(np.argmax(np.abs(u)))
        fixed = u * np.exp(-1j * np.angle(u.flat[k]))
        if np.max(np.abs(fixed.imag)) < tol:
            return "real-local-unitary"
        raise ValidationError("complex one-qubit unitaries need not keep amplitudes real")
    if u.shape == (4, 4) and np.allclose(u, CNOT, atol=tol):
        if all(is_css(v) for v in states):
            return "cnot"
        raise ValidationError("CNOT keeps determination only for states stabilized by {I,X}^n and {I,Z}^n strings")
    raise ValidationError("multi-qubit real unitaries need not do so: only CNOT and local conjugations are allowed")


def closure_conjugate(
    target: Union[XZBasisSet, np.ndarray], u: np.ndarray, targets: Optional[Sequence[int]] = None
) -> ClosureResult:
    """Conjugate a determined pure state (or every state of a basis) by U on `targets`."""
    u = as_square(u)
    states = list(target.states) if isinstance(target, XZBasisSet) else [np.asarray(target, dtype=complex).reshape(-1)]
    n = int(round(np.log2(states[0].size)))
    k = int(round(np.log2(u.shape[0])))
    targets = list(range(k)) if targets is None else list(targets)
    if len(targets) != k or any(t < 0 or t >= n for t in targets):
        raise DimensionError(f"{k}-qubit operator cannot act on positions {targets} of {n} qubits")
    rule = _conjugation_rule(u, states)
    mapped = [apply_local(u, v, [2] * n, targets) for v in states]
    logger.debug(f"🔁 {rule} conjugation on qubits {targets}")
    if isinstance(target, XZBasisSet):
        return ClosureResult(XZBasisSet(target.q, tuple(mapped), f"{target.name}^{rule}"), rule)
    return ClosureResult(mapped[0], rule)


# --- Stabilizer sets and syndromes ---
def _symplectic(p: PauliString) -> int:
    bits = 0
    for i, c in enumerate(p.letters):
        if c in "XY":
            bits |= 1 << i
        if c in "ZY":
            bits |= 1 << (len(p.letters) + i)
    return bits


def gf2_rank(vectors: Sequence[int]) -> int:
    rank = 0
    rows = list(vectors)
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


@dataclass(frozen=True)
class XZStabilizerSet:
    """Pairwise commuting, independent X/Z strings on r qubits"""

    r: int
    generators: Tuple[PauliString, ...]

    def __post_init__(self) -> None:
        gens = tuple(g if isinstance(g, PauliString) else PauliString.from_label(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens or len(gens) > self.r:
            raise ValidationError(f"a stabilizer set on {self.r} qubits has 1 to {self.r} generators, got {len(gens)}")
        for g in gens:
            if g.n_qubits != self.r:
                raise DimensionError(f"generator {g} does not act on {self.r} qubits")
            if any(c not in XZ_LETTERS for c in g.letters) or not g.is_hermitian:
                raise ValidationError(f"generator {g} is not a signed I/X/Z string")
        for i, a in enumerate(gens):
            for b in gens[i + 1:]:
                if not a.commutes_with(b):
                    raise ValidationError(f"generators {a} and {b} anticommute")
        if gf2_rank([_symplectic(g) for g in gens]) != len(gens):
            raise ValidationError("generators are not multiplicatively independent")

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "XZStabilizerSet":
        gens = tuple(PauliString.from_label(l) for l in labels)
        return cls(gens[0].n_qubits if gens else 0, gens)

    def __len__(self) -> int:
        return len(self.generators)

    def reflections(self) -> List[np.ndarray]:
        return [g.matrix() for g in self.generators]


def syndrome_determined(bases: Sequence[int], answers: Sequence[int], p: PauliString) -> Optional[int]:
    """
    Sign of P fixed by one-qubit measurements (basis bit 0 = X, 1 = Z; answer bit 0 = +1),
    or None when some non-identity letter of P was not measured.
    """
    if not (len(bases) == len(answers) == p.n_qubits):
        raise DimensionError(f"{len(bases)} bases and {len(answers)} answers for a {p.n_qubits}-qubit string")
    sign = -1 if p.phase == 2 else 1
    for c, b, a in zip(p.letters, bases, answers):
        if c == "I":
            continue
        if c != "XZ"[b]:
            return None
        sign *= (-1) ** a
    return sign
