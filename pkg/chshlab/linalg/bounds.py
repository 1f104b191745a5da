"""
Metric and rounding utilities with their inequality checks.

Each audit function returns the two sides of an inequality (and the parameters they were
computed from) so that callers and tests can compare them; nothing here asserts.
"""

import logging
from typing import Hashable, List, Mapping, Sequence, Tuple

import numpy as np

from chshlab.errors import DimensionError, LabelError, ValidationError
from chshlab.linalg.operators import (
    apply_local,
    as_density,
    as_square,
    as_state,
    check_dims,
    dagger,
    is_hermitian,
    is_unitary,
    kron,
    outer,
    partial_trace,
    reduced_state,
    trace_norm,
)

logger = logging.getLogger("chshlab.linalg.bounds")

SLACK = 1e-6


# --- Block-diagonal states ---
def _check_labels(rho1: Mapping[Hashable, np.ndarray], rho2: Mapping[Hashable, np.ndarray]) -> List[Hashable]:
    if set(rho1) != set(rho2):
        missing = set(rho1) ^ set(rho2)
        raise LabelError(f"block maps have different labels: {sorted(map(str, missing))[:5]}")
    return list(rho1)


def block_epsilon(rho1: Mapping[Hashable, np.ndarray], rho2: Mapping[Hashable, np.ndarray]) -> float:
    """Σ_k ‖ρ1_k − ρ2_k‖₁, the trace distance of the block-diagonal states."""
    return sum(trace_norm(rho1[k] - rho2[k]) for k in _check_labels(rho1, rho2))


def block_diag_distance(
    rho1: Mapping[Hashable, np.ndarray], rho2: Mapping[Hashable, np.ndarray]
) -> Tuple[float, float]:
    """
    (total variation of the block distributions, expected conditional trace distance).

    The expectation is taken over the first map's distribution; zero-trace blocks have no
    conditional state and contribute nothing.
    """
    tv = 0.0
    expected = 0.0
    for k in _check_labels(rho1, rho2):
        a = as_square(rho1[k])
        b = as_square(rho2[k])
        ta = np.trace(a).real
        tb = np.trace(b).real
        tv += abs(ta - tb)
        if ta <= 0:
            continue
        cond_b = b / tb if tb > 0 else np.zeros_like(b)
        expected += ta * trace_norm(a / ta - cond_b)
    return tv / 2, expected


# --- Gentle measurement ---
def gentle_measurement_residual(rho: np.ndarray, pi: np.ndarray) -> Tuple[float, float]:
    """(‖ρ − √Π ρ √Π‖₁, 2√(1 − Tr Πρ))."""
    rho = as_density(rho)
    pi = as_square(pi)
    if pi.shape != rho.shape:
        raise DimensionError(f"Π has shape {pi.shape}, ρ has {rho.shape}")
    if not is_hermitian(pi):
        raise ValidationError("Π is not Hermitian")
    evals, evecs = np.linalg.eigh(pi)
    if evals.min() < -1e-9 or evals.max() > 1 + 1e-9:
        raise ValidationError(f"Π has eigenvalues outside [0, 1]: [{evals.min()}, {evals.max()}]")
    root = evecs @ np.diag(np.sqrt(np.clip(evals, 0, 1))) @ dagger(evecs)
    lhs = trace_norm(rho - root @ rho @ root)
    accept = float(np.clip(np.trace(pi @ rho).real, 0, 1))
    return lhs, 2 * np.sqrt(1 - accept)


# --- Markov on the unit ball ---
def markov_unit_ball(points: Sequence[Sequence[float]], p: float) -> List[int]:
    """Indices j with ‖x_j − x̄‖ ≤ √(2δ/p), δ = 1 − ‖x̄‖."""
    if len(points) == 0:
        raise ValidationError("markov_unit_ball needs at least one point")
    if not 0 < p < 1:
        raise ValidationError(f"p must lie in (0, 1), got {p}")
    cloud = np.asarray(points, dtype=float)
    if np.linalg.norm(cloud, axis=1).max() > 1 + 1e-9:
        raise ValidationError("points must lie in the unit ball")
    mean = cloud.mean(axis=0)
    delta = max(0.0, 1 - np.linalg.norm(mean))
    radius = np.sqrt(2 * delta / p)
    distances = np.linalg.norm(cloud - mean, axis=1)
    return [int(j) for j in np.flatnonzero(distances <= radius + 1e-12)]


# --- Vector distance versus trace distance ---
def vector_vs_trace_distance(a: np.ndarray, b: np.ndarray) -> Tuple[float, float, float]:
    """(√2·min_φ‖a − e^{iφ}b‖, ‖aa† − bb†‖₁, 2‖a − b‖)."""
    a = np.asarray(a, dtype=complex).reshape(-1)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if a.shape != b.shape:
        raise DimensionError(f"vectors have different dimensions {a.size} and {b.size}")
    overlap = abs(np.vdot(a, b))
    closest = np.sqrt(max(0.0, np.vdot(a, a).real + np.vdot(b, b).real - 2 * overlap))
    lower = np.sqrt(2) * closest
    mid = trace_norm(outer(a) - outer(b))
    upper = 2 * np.linalg.norm(a - b)
    return float(lower), float(mid), float(upper)


# --- Rounding a Hermitian contraction to a reflection ---
def round_to_reflection(h: np.ndarray) -> np.ndarray:
    """sign(H), eigenvalue 0 rounding to +1."""
    h = as_square(h)
    if not is_hermitian(h):
        raise ValidationError("can only round Hermitian operators")
    evals, evecs = np.linalg.eigh((h + dagger(h)) / 2)
    signs = np.where(evals >= 0, 1.0, -1.0)
    return evecs @ np.diag(signs) @ dagger(evecs)


def reflection_rounding_bound(eps: float) -> float:
    """ε + 2^{4/3} ε^{1/3}."""
    return eps + 2 ** (4 / 3) * eps ** (1 / 3)


def rounding_cutoff(eps: float) -> float:
    """Eigenvalue cutoff (2ε)^{1/3} below which the rounding may move an eigenvector far."""
    return (2 * eps) ** (1 / 3)


def hermitian_to_reflection(h: np.ndarray, phi: np.ndarray, u: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Round H to the reflection Δ = sign(H) and return (Δ, ‖(U − Δ)φ‖).

    With ε = ‖(U − H)φ‖ the residual never exceeds ε + 2^{4/3} ε^{1/3}: the rounding moves φ
    by at most √(2ε) because ‖Hφ‖ ≥ 1 − ε.
    """
    h = as_square(h)
    phi = as_state(phi)
    u = as_square(u)
    if not is_hermitian(h):
        raise ValidationError("H is not Hermitian")
    if np.linalg.norm(h, 2) > 1 + 1e-9:
        raise ValidationError(f"‖H‖ = {np.linalg.norm(h, 2)} exceeds 1")
    if not is_unitary(u):
        raise ValidationError("U is not unitary")
    if not (h.shape == u.shape and h.shape[0] == phi.size):
        raise DimensionError("H, U and φ act on different spaces")

    delta = round_to_reflection(h)
    residual = float(np.linalg.norm((u - delta) @ phi))
    eps = float(np.linalg.norm((u - h) @ phi))
    logger.debug(f"🔁 rounded H at ε={eps:.3g}, cutoff={rounding_cutoff(eps):.3g}, residual={residual:.3g}")
    return delta, residual


# --- Pure parts determine the whole ---
def pure_parts_gap(rho: np.ndarray, pures: Sequence[np.ndarray], dims: Sequence[int]) -> Tuple[float, float, float]:
    """
    (‖ρ − ⊗π_j‖₁, m(2√δ + δ), δ) with δ = max_j (1 − ⟨π_j|ρ_j|π_j⟩) over the factor marginals.
    """
    rho = as_density(rho)
    dims = check_dims(dims, rho.shape[0])
    if len(pures) != len(dims):
        raise DimensionError(f"{len(pures)} pure states for {len(dims)} factors")
    delta = 0.0
    for j, pure in enumerate(pures):
        pure = as_state(pure)
        marginal = partial_trace(rho, dims, [j])
        delta = max(delta, 1 - np.vdot(pure, marginal @ pure).real)
    delta = max(delta, 0.0)
    target = kron(*(outer(as_state(p)) for p in pures))
    m = len(dims)
    return trace_norm(rho - target), m * (2 * np.sqrt(delta) + delta), delta


# --- Blocks close in expectation imply matrices close ---
def measured_epsilon(probabilities: Sequence[float], distances: Sequence[float]) -> float:
    """Smallest ε with Σ_{i: t_i ≤ ε} p_i ≥ 1 − ε."""
    order = np.argsort(distances, kind="stable")
    best = 1.0
    cumulative = 0.0
    for i in order:
        cumulative += probabilities[i]
        best = min(best, max(float(distances[i]), 1 - cumulative))
    return max(best, 0.0)


def block_close_gap(
    d: int,
    psi_prime: np.ndarray,
    prime_dims: Tuple[int, int],
    projectors: Mapping[int, Sequence[np.ndarray]],
) -> Tuple[float, float, float]:
    """
    Compare a coarse-grained measurement of Bob's registers against his computational-basis
    measurement, acting on (1/√d) Σ_i |ii⟩_AB ⊗ |ψ'⟩_A'B'.

    `projectors[i]` lists the Π_iℓ on B ⊗ B'. Returns (lhs, ε, 31 ε^{1/3}) where lhs is the
    trace distance of the two post-measurement states reduced to (outcome, A, A') and ε is the
    measured closeness parameter of the outcome-conditioned states on A.
    """
    d_a1, d_b1 = prime_dims
    psi_prime = as_state(psi_prime)
    if psi_prime.size != d_a1 * d_b1:
        raise DimensionError(f"ψ' has {psi_prime.size} amplitudes, dims {prime_dims}")
    if set(projectors) != set(range(d)):
        raise LabelError(f"projectors must be keyed by outcomes 0..{d - 1}")

    # factor order (A, A', B, B')
    dims = [d, d_a1, d, d_b1]
    maximally = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    psi = np.einsum("ab,cd->acbd", maximally.reshape(d, d), psi_prime.reshape(d_a1, d_b1)).reshape(-1)

    total = sum(p for plist in projectors.values() for p in plist)
    if not np.allclose(total, np.eye(d * d_b1), atol=1e-9):
        raise ValidationError("projectors do not sum to the identity on B ⊗ B'")

    prime_marginal = reduced_state(psi_prime, [d_a1, d_b1], [0])
    lhs = 0.0
    probabilities: List[float] = []
    distances: List[float] = []
    for i in range(d):
        block = np.zeros((d * d_a1, d * d_a1), dtype=complex)
        for proj in projectors[i]:
            branch = apply_local(proj, psi, dims, [2, 3])
            block += reduced_state(branch, dims, [0, 1])
        ket_i = np.zeros(d)
        ket_i[i] = 1
        collapsed = np.kron(outer(ket_i), prime_marginal) / d
        lhs += trace_norm(block - collapsed)

        p_i = np.trace(block).real
        probabilities.append(p_i)
        if p_i > 1e-15:
            rho_i = partial_trace(block, [d, d_a1], [0]) / p_i
            distances.append(trace_norm(rho_i - outer(ket_i)))
        else:
            distances.append(0.0)

    eps = measured_epsilon(probabilities, distances)
    return lhs, eps, 31 * eps ** (1 / 3)

