"""
Dense operators, states and super-operators.

Matrices and vectors are plain complex numpy arrays; the helpers here validate them against
the invariants the rest of the package relies on (reflections square to I, states are
normalized, Kraus sets are trace preserving).
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import unitary_group

from chshlab.config import config
from chshlab.errors import DimensionError, ValidationError

logger = logging.getLogger("chshlab.linalg.operators")

# --- Constant operators ---
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

COS8 = np.cos(np.pi / 8)
SIN8 = np.sin(np.pi / 8)
# exp(-i pi Y / 8): rotation by pi/4 about the y axis
G = np.array([[COS8, -SIN8], [SIN8, COS8]], dtype=complex)

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
EPR = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def kron(*ops: np.ndarray) -> np.ndarray:
    return reduce(np.kron, ops, np.ones((1,) * ops[0].ndim, dtype=complex))


def outer(a: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    b = a if b is None else b
    return np.outer(a, b.conj())


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def flip(angle: float) -> np.ndarray:
    """cos(2a) Z + sin(2a) X, the real reflection with Bloch angle 2a in the xz-plane."""
    return np.cos(2 * angle) * Z + np.sin(2 * angle) * X


# --- Validation ---
def as_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def is_hermitian(m: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = config.validation_tol if tol is None else tol
    return bool(np.allclose(m, dagger(m), atol=tol))


def is_reflection(m: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = config.validation_tol if tol is None else tol
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return is_hermitian(m, tol) and bool(np.allclose(m @ m, np.eye(m.shape[0]), atol=tol))


def as_reflection(m: np.ndarray, name: str = "operator") -> np.ndarray:
    m = as_square(m)
    if not is_reflection(m):
        raise ValidationError(f"{name} is not a reflection (Hermitian with square identity)")
    return m


def is_unitary(m: np.ndarray, tol: Optional[float] = None) -> bool:
    tol = config.validation_tol if tol is None else tol
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(
        np.allclose(dagger(m) @ m, np.eye(m.shape[0]), atol=tol)
    )


def as_state(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"state vector has norm {norm}, expected 1")
    return v


def as_density(rho: np.ndarray, subnormalized: bool = False, tol: float = 1e-10) -> np.ndarray:
    rho = as_square(rho)
    if not is_hermitian(rho, tol):
        raise ValidationError("density matrix is not Hermitian")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol:
        raise ValidationError(f"density matrix has negative eigenvalue {evals.min()}")
    trace = np.trace(rho).real
    if subnormalized:
        if trace > 1 + tol:
            raise ValidationError(f"sub-normalized block has trace {trace} > 1")
    elif abs(trace - 1) > tol:
        raise ValidationError(f"density matrix has trace {trace}, expected 1")
    return rho


def check_dims(dims: Sequence[int], total: int) -> List[int]:
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims) or int(np.prod(dims)) != total:
        raise DimensionError(f"factor dims {dims} do not multiply to {total}")
    return dims


# --- Norms and partial traces ---
def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = as_square(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False).sum())


def gram_trace_distance(m: np.ndarray, n: np.ndarray) -> float:
    """
    ‖MM† − NN†‖₁ for two d x r matrices, computed in their joint column space.

    Blocks that are reduced states of pure vectors come in this factored form, so the
    comparison never builds a d x d matrix.
    """
    k = np.hstack([np.atleast_2d(m), np.atleast_2d(n)])
    r = np.atleast_2d(m).shape[1]
    gram = dagger(k) @ k
    evals, evecs = np.linalg.eigh((gram + dagger(gram)) / 2)
    root = evecs @ np.diag(np.sqrt(np.clip(evals, 0.0, None))) @ dagger(evecs)
    signs = np.diag([1.0] * r + [-1.0] * (k.shape[1] - r))
    return float(np.abs(np.linalg.eigvalsh(root @ signs @ root)).sum())


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every factor not in `keep`; kept factors stay in ascending order."""
    rho = as_square(rho)
    dims = check_dims(dims, rho.shape[0])
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {len(dims)} factors")

    tensor = rho.reshape(dims + dims)
    for axis in sorted(set(range(len(dims))) - set(keep), reverse=True):
        half = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=axis, axis2=axis + half)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return tensor.reshape(kept_dim, kept_dim)


def reduced_state(psi: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming the full outer product."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dims = check_dims(dims, psi.size)
    keep = sorted(set(keep))
    rest = [i for i in range(len(dims)) if i not in keep]
    t = np.transpose(psi.reshape(dims), keep + rest)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    t = t.reshape(kept_dim, -1)
    return t @ dagger(t)


# --- Local application on tensor factors ---
def apply_local(op: np.ndarray, psi: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Apply `op` to the factors `targets` (in that order) of a state vector."""
    dims = list(dims)
    targets = list(targets)
    k = len(targets)
    tdims = [dims[t] for t in targets]
    op = np.asarray(op, dtype=complex)
    if op.shape != (int(np.prod(tdims)), int(np.prod(tdims))):
        raise DimensionError(f"operator shape {op.shape} does not match factors {tdims}")
    t = np.asarray(psi, dtype=complex).reshape(dims)
    t = np.tensordot(op.reshape(tdims + tdims), t, axes=(list(range(k, 2 * k)), targets))
    t = np.moveaxis(t, list(range(k)), targets)
    return t.reshape(-1)


def apply_isometry(w: np.ndarray, psi: np.ndarray, dims: Sequence[int], factor: int) -> np.ndarray:
    """Apply a (possibly non-square) map to one tensor factor of a state vector."""
    t = np.asarray(psi, dtype=complex).reshape(list(dims))
    if w.shape[1] != t.shape[factor]:
        raise DimensionError(f"map of shape {w.shape} cannot act on a factor of dim {t.shape[factor]}")
    t = np.tensordot(w, t, axes=([1], [factor]))
    return np.moveaxis(t, 0, factor).reshape(-1)


def embed(op: np.ndarray, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Full matrix of `op` acting on `targets` inside the tensor product `dims`."""
    total = int(np.prod(dims))
    cols = [apply_local(op, np.eye(total, dtype=complex)[:, c], dims, targets) for c in range(total)]
    return np.stack(cols, axis=1)


def permute_factors(psi: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a state vector so that new factor i is old factor order[i]."""
    return np.transpose(np.asarray(psi).reshape(list(dims)), list(order)).reshape(-1)


# --- Super-operators ---
@dataclass(frozen=True)
class SuperOperator:
    """Completely positive trace-preserving map given by Kraus operators"""

    kraus: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.kraus:
            raise ValidationError("super-operator needs at least one Kraus operator")
        shapes = {k.shape for k in self.kraus}
        if len(shapes) != 1:
            raise DimensionError(f"Kraus operators have mixed shapes {shapes}")
        d_in = self.kraus[0].shape[1]
        total = sum(dagger(k) @ k for k in self.kraus)
        if not np.allclose(total, np.eye(d_in), atol=config.validation_tol):
            raise ValidationError("Kraus operators are not trace preserving")

    @property
    def input_dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.kraus[0].shape[0]

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = as_square(rho)
        if rho.shape[0] != self.input_dim:
            raise DimensionError(f"input has dim {rho.shape[0]}, map expects {self.input_dim}")
        return sum(k @ rho @ dagger(k) for k in self.kraus)


def random_superoperator(d_in: int, d_out: int, n_kraus: int, rng: np.random.Generator) -> SuperOperator:
    """Kraus set from a random isometry C^d_in -> C^(d_out * n_kraus)."""
    big = d_out * n_kraus
    u = unitary_group.rvs(max(big, d_in), random_state=rng)
    iso = u[:big, :d_in]
    return SuperOperator(tuple(iso[i * d_out:(i + 1) * d_out, :] for i in range(n_kraus)))


# --- Random instances ---
def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng)


def random_reflection(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """U diag(+1^rank, -1^(dim-rank)) U† for Haar U; rank drawn uniformly when omitted."""
    rank = int(rng.integers(0, dim + 1)) if rank is None else rank
    u = random_unitary(dim, rng)
    signs = np.array([1.0] * rank + [-1.0] * (dim - rank))
    r = u @ np.diag(signs) @ dagger(u)
    return (r + dagger(r)) / 2


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real

