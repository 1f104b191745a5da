# probe.py

"""
Numerical falsifier for XZ-determination.

For each ε the probe searches for a density matrix ρ with |Tr P(ρ − σ)| ≤ ε for every probed
string P while trace_norm(ρ − σ) is as large as possible. The search is a random-restart
hill climb: every step picks a traceless direction D and moves ρ to the farther end of the
feasible segment ρ + tD when that end is farther from σ. Directions come in three kinds:

  - face directions V K V† on the support of ρ that leave every probed coordinate unchanged
  - free directions, any Hermitian matrix with every probed coordinate removed
  - raw directions, limited only by the ε box (used when ε > 0)

A failure to find a witness is reported as such; it is not a proof of determination.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import null_space

from chshlab.config import config
from chshlab.errors import DimensionError
from chshlab.linalg.operators import as_density, trace_norm
from chshlab.linalg.pauli import PauliString
from chshlab.rng import stream
from chshlab.schemas import ProbePoint, ProbeReport
from chshlab.tomography.xz import xz_strings

logger = logging.getLogger("chshlab.tomography.probe")

PSD_TOL = 1e-12
SUPPORT_TOL = 1e-9


def local_strings(q_left: int, q_right: int) -> List[PauliString]:
    """I/X/Z strings acting on one side only: {P⊗I} ∪ {I⊗P'}."""
    left = [PauliString(p.letters + "I" * q_right) for p in xz_strings(q_left)]
    right = [PauliString("I" * q_left + p.letters) for p in xz_strings(q_right)[1:]]
    return left + right


def hermitian_basis(r: int) -> List[np.ndarray]:
    """An orthonormal basis of r×r Hermitian matrices (r² elements)."""
    out = []
    for i in range(r):
        e = np.zeros((r, r), dtype=complex)
        e[i, i] = 1
        out.append(e)
    for i in range(r):
        for j in range(i + 1, r):
            e = np.zeros((r, r), dtype=complex)
            e[i, j] = e[j, i] = 1 / np.sqrt(2)
            out.append(e)
            f = np.zeros((r, r), dtype=complex)
            f[i, j], f[j, i] = -1j / np.sqrt(2), 1j / np.sqrt(2)
            out.append(f)
    return out


def _random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


class _Search:
    def __init__(self, sigma: np.ndarray, operators: Sequence[np.ndarray], eps: float, rng: np.random.Generator):
        self.sigma = sigma
        self.dim = sigma.shape[0]
        self.ops = list(operators)
        self.eps = eps
        self.rng = rng

    def coordinates(self, m: np.ndarray) -> np.ndarray:
        return np.array([np.trace(p @ m).real for p in self.ops])

    def _without_coordinates(self, d: np.ndarray) -> np.ndarray:
        # Pauli strings are orthogonal with squared norm dim
        for p in self.ops:
            d = d - np.trace(p @ d) * p / self.dim
        return d

    def direction(self, rho: np.ndarray) -> np.ndarray:
        kind = int(self.rng.integers(3))
        if kind == 0:
            values, vectors = np.linalg.eigh(rho)
            v = vectors[:, values > SUPPORT_TOL]
            basis = [v @ k @ v.conj().T for k in hermitian_basis(v.shape[1])]
            constraints = np.array([[np.trace(p @ b).real for b in basis] for p in self.ops])
            kernel = null_space(constraints)
            if kernel.shape[1] > 0:
                z = kernel @ self.rng.normal(size=kernel.shape[1])
                return sum(c * b for c, b in zip(z, basis))
        d = _random_hermitian(self.dim, self.rng)
        d = d - np.trace(d).real * np.eye(self.dim) / self.dim
        if kind == 2 and self.eps > 0:
            return d
        return self._without_coordinates(d)

    def _box(self, rho: np.ndarray, d: np.ndarray) -> Tuple[float, float]:
        lo, hi = -np.inf, np.inf
        c = self.coordinates(rho - self.sigma)
        g = self.coordinates(d)
        for ci, gi in zip(c, g):
            if abs(gi) > 1e-12:
                a, b = (-self.eps - ci) / gi, (self.eps - ci) / gi
                lo, hi = max(lo, min(a, b)), min(hi, max(a, b))
        return min(lo, 0.0), max(hi, 0.0)

    def _psd_edge(self, rho: np.ndarray, d: np.ndarray, limit: float) -> float:
        """Largest t in [0, limit] keeping ρ + tD positive semidefinite."""
        limit = min(limit, 2.0 / max(np.linalg.norm(d, 2), 1e-300))
        if np.linalg.eigvalsh(rho + limit * d)[0] >= -PSD_TOL:
            return limit
        lo, hi = 0.0, limit
        for _ in range(60):
            mid = (lo + hi) / 2
            if np.linalg.eigvalsh(rho + mid * d)[0] >= -PSD_TOL:
                lo = mid
            else:
                hi = mid
        return lo

    def step(self, rho: np.ndarray, current: float) -> Tuple[np.ndarray, float]:
        d = self.direction(rho)
        norm = np.linalg.norm(d)
        if norm < 1e-14:
            return rho, current
        d = d / norm
        lo, hi = self._box(rho, d)
        hi = self._psd_edge(rho, d, hi)
        lo = -self._psd_edge(rho, -d, -lo)
        for t in (lo, hi):
            candidate = rho + t * d
            distance = trace_norm(candidate - self.sigma)
            if distance > current:
                rho, current = candidate, distance
        return rho, current


def _operator_matrices(q: int, operators: Optional[Sequence[PauliString]]) -> List[np.ndarray]:
    strings = xz_strings(q) if operators is None else list(operators)
    for p in strings:
        if p.n_qubits != q:
            raise DimensionError(f"probed string {p} does not act on {q} qubits")
    identity = PauliString.identity(q)
    if all(p.letters != identity.letters for p in strings):
        strings = [identity] + strings
    return [p.matrix() for p in strings]


def empirical_exponent(points: Sequence[ProbePoint]) -> Optional[float]:
    """Slope of log(max distance) against log(ε) over the points with ε > 0 and a nonzero distance."""
    usable = [(p.eps, p.max_distance) for p in points if p.eps > 0 and p.max_distance > 1e-12]
    if len({e for e, _ in usable}) < 2:
        return None
    x, y = np.log([u[0] for u in usable]), np.log([u[1] for u in usable])
    return float(np.polyfit(x, y, 1)[0])


def xz_determination_probe(
    sigma: np.ndarray,
    eps_grid: Sequence[float],
    trials: Optional[int] = None,
    seed: int = 0,
    operators: Optional[Sequence[PauliString]] = None,
    steps: int = 40,
    witness_tol: float = 1e-3,
) -> ProbeReport:
    """
    Largest trace_norm(ρ − σ) found per ε over states whose probed coordinates (default: every
    I/X/Z string) stay within ε of σ's.
    """
    sigma = as_density(sigma)
    q = int(round(np.log2(sigma.shape[0])))
    if 2 ** q != sigma.shape[0]:
        raise DimensionError(f"dimension {sigma.shape[0]} is not a power of two")
    trials = config.probe_restarts if trials is None else trials
    ops = _operator_matrices(q, operators)

    points = []
    for eps in eps_grid:
        rng = stream(seed, f"probe/{eps!r}")
        search = _Search(sigma, ops, float(eps), rng)
        best = 0.0
        for _ in range(trials):
            rho, distance = sigma.copy(), 0.0
            for _ in range(steps):
                rho, distance = search.step(rho, distance)
            best = max(best, distance)
        points.append(ProbePoint(eps=float(eps), max_distance=best, witness_found=best > witness_tol))
        logger.debug(f"🔎 ε={eps:g}: largest distance {best:.3g} after {trials} restarts")

    report = ProbeReport(q=q, restarts=trials, points=points, exponent=empirical_exponent(points))
    for p in points:
        if p.eps == 0 and p.witness_found:
            logger.info(f"⚠️ found a state with the same probed coordinates at distance {p.max_distance:.3g}")
    return report
