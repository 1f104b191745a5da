# test_xz_probe.py

import numpy as np
import pytest

from chshlab.errors import DimensionError, ValidationError
from chshlab.linalg.operators import I2, KET0, Y, as_density, outer, trace_norm
from chshlab.tomography.probe import empirical_exponent, hermitian_basis, local_strings, xz_determination_probe
from chshlab.tomography.xz import pauli_coordinate, stabilizer_xz_basis, xz_strings

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
A = outer(np.kron(KET0, PLUS))
B = outer(np.kron(PLUS, KET0))
MIXED = (A + B) / 2


def test_y_eigenstate_is_not_determined():
    report = xz_determination_probe((I2 + Y) / 2, [0.0], trials=3)
    point = report.points[0]
    # ½(I − Y) has the same X and Z coordinates; the trace norm of the difference is 2
    assert point.witness_found
    assert point.max_distance == pytest.approx(2, abs=1e-6)
    assert report.q == 1 and report.restarts == 3


def test_xz_plane_state_is_determined():
    report = xz_determination_probe(outer(PLUS), [0.0], trials=5)
    assert report.points[0].max_distance <= 1e-4
    assert not report.points[0].witness_found


def test_stabilizer_basis_states_are_determined():
    states = list(stabilizer_xz_basis("bell-real").states) + [KET0]
    for psi in states:
        report = xz_determination_probe(outer(psi), [0.0], trials=3, steps=20)
        assert report.points[0].max_distance <= 1e-3


def test_four_qubit_basis_states_are_determined():
    basis = stabilizer_xz_basis("double-bell-cnot")
    for o in (0, 5):
        report = xz_determination_probe(basis.projector(o), [0.0], trials=2, steps=15)
        assert report.points[0].max_distance <= 1e-3


def test_mixed_two_qubit_state_has_an_imaginary_witness():
    # i·t(|a⟩⟨b| − |b⟩⟨a|) has no I/X/Z component and keeps ρ positive up to t = ½
    a, b = np.kron(KET0, PLUS), np.kron(PLUS, KET0)
    rho = MIXED + 0.5j * (np.outer(a, b.conj()) - np.outer(b, a.conj()))
    as_density(rho)
    for p in xz_strings(2):
        assert pauli_coordinate(rho, p) == pytest.approx(pauli_coordinate(MIXED, p), abs=1e-12)
    assert trace_norm(rho - MIXED) == pytest.approx(np.sqrt(3) / 2, abs=1e-12)

    report = xz_determination_probe(MIXED, [0.0], trials=5)
    assert report.points[0].witness_found
    assert report.points[0].max_distance >= 0.5


def test_tensor_of_mixed_states_against_local_coordinates():
    sigma = np.kron(MIXED, MIXED)
    rho = (np.kron(A, A) + np.kron(B, B)) / 2
    strings = local_strings(2, 2)
    assert len(strings) == 9 + 8
    for p in strings:
        assert pauli_coordinate(rho, p) == pytest.approx(pauli_coordinate(sigma, p), abs=1e-12)
    assert trace_norm(rho - sigma) == pytest.approx(0.75, abs=1e-12)

    report = xz_determination_probe(sigma, [0.0], trials=3, operators=strings)
    assert report.points[0].max_distance > 0.5


def test_positive_eps_reports_an_exponent():
    report = xz_determination_probe(outer(PLUS), [0.0, 1e-3, 1e-2], trials=5)
    zero, small, large = report.points
    assert zero.max_distance <= 1e-4
    assert large.max_distance >= small.max_distance > zero.max_distance
    assert report.exponent is not None and report.exponent > 0


def test_exponent_needs_two_scales():
    report = xz_determination_probe(outer(PLUS), [0.0, 1e-2], trials=2)
    assert report.exponent is None
    assert empirical_exponent(report.points) is None


def test_probe_repeats_with_the_seed():
    first = xz_determination_probe(MIXED, [0.0, 1e-2], trials=2, seed=5)
    second = xz_determination_probe(MIXED, [0.0, 1e-2], trials=2, seed=5)
    assert first == second


def test_probe_input_checks():
    with pytest.raises(ValidationError):
        xz_determination_probe(np.eye(2), [0.0], trials=1)
    with pytest.raises(DimensionError):
        xz_determination_probe(np.eye(3) / 3, [0.0], trials=1)
    with pytest.raises(DimensionError):
        xz_determination_probe(outer(PLUS), [0.0], trials=1, operators=local_strings(1, 1))


def test_hermitian_basis_is_orthonormal():
    basis = hermitian_basis(3)
    gram = np.array([[np.trace(a.conj().T @ b).real for b in basis] for a in basis])
    assert len(basis) == 9 and np.allclose(gram, np.eye(9))
    assert all(np.allclose(m, m.conj().T) for m in basis)


def test_local_strings_are_one_sided():
    for p in local_strings(1, 2):
        assert p.letters[0] == "I" or p.letters[1:] == "II"
