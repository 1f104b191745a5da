# test_linalg.py

import itertools

import numpy as np
import pytest

from chshlab.errors import CapacityError, DimensionError, ValidationError
from chshlab.linalg.operators import (
    EPR, KET0, X, Z, SuperOperator, apply_local, as_reflection, embed, kron, outer, partial_trace,
    random_density, random_reflection, random_state, random_superoperator, random_unitary,
    reduced_state, trace_norm,
)
from chshlab.linalg.register import QubitRegister, epr_register, reflection_projector


def test_trace_norm_of_z_and_zero():
    assert trace_norm(Z) == pytest.approx(2.0, abs=1e-12)
    assert trace_norm(np.zeros((3, 3))) == pytest.approx(0.0)


def test_trace_norm_matches_svd_oracle(rng):
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    oracle = sum(np.linalg.svd(m)[1])
    assert trace_norm(m) == pytest.approx(oracle, abs=1e-10)


def test_trace_norm_rejects_non_square():
    with pytest.raises(DimensionError):
        trace_norm(np.ones((2, 3)))


def test_trace_norm_is_twice_best_projector_overlap(rng):
    # for traceless Hermitian A, ‖A‖₁ = 2 max_Π Tr(ΠA), attained on the positive part
    a = random_density(4, rng) - random_density(4, rng)
    evals, evecs = np.linalg.eigh(a)
    positive = evecs[:, evals > 0]
    best = np.trace(positive.conj().T @ a @ positive).real
    assert trace_norm(a) == pytest.approx(2 * best, abs=1e-10)


def test_partial_trace_of_epr_is_maximally_mixed():
    assert np.allclose(partial_trace(outer(EPR), [2, 2], [0]), np.eye(2) / 2, atol=1e-12)


def test_partial_trace_of_product(rng):
    rho_a = random_density(2, rng)
    rho_b = random_density(3, rng)
    assert np.allclose(partial_trace(np.kron(rho_a, rho_b), [2, 3], [0]), rho_a, atol=1e-12)
    assert np.allclose(partial_trace(np.kron(rho_a, rho_b), [2, 3], [1]), rho_b, atol=1e-12)


def test_partial_trace_matches_index_loop(rng):
    rho = random_density(4, rng)
    t = rho.reshape(2, 2, 2, 2)
    oracle = np.zeros((2, 2), dtype=complex)
    for i, k, j in itertools.product(range(2), repeat=3):
        oracle[i, k] += t[i, j, k, j]
    assert np.allclose(partial_trace(rho, [2, 2], [0]), oracle, atol=1e-12)


def test_partial_trace_dimension_mismatch(rng):
    with pytest.raises(DimensionError):
        partial_trace(random_density(4, rng), [2, 3], [0])


def test_reduced_state_agrees_with_partial_trace(rng):
    psi = random_state(12, rng)
    for keep in ([0], [1], [2], [0, 2]):
        assert np.allclose(
            reduced_state(psi, [2, 3, 2], keep), partial_trace(outer(psi), [2, 3, 2], keep), atol=1e-12
        )


def test_apply_local_matches_index_oracle(rng):
    psi = random_state(8, rng)
    u = random_unitary(4, rng)
    # the operator's first factor acts on qubit 2, its second on qubit 0
    oracle = np.zeros((8, 8), dtype=complex)
    for i0, i1, i2, j0, j2 in itertools.product(range(2), repeat=5):
        oracle[i0 * 4 + i1 * 2 + i2, j0 * 4 + i1 * 2 + j2] = u[i2 * 2 + i0, j2 * 2 + j0]
    assert np.allclose(apply_local(u, psi, [2, 2, 2], [2, 0]), oracle @ psi, atol=1e-12)
    assert np.allclose(embed(u, [2, 2, 2], [2, 0]), oracle, atol=1e-12)


def test_apply_local_on_first_factor_is_kron(rng):
    psi = random_state(6, rng)
    u = random_unitary(2, rng)
    assert np.allclose(apply_local(u, psi, [2, 3], [0]), np.kron(u, np.eye(3)) @ psi, atol=1e-12)
    v = random_unitary(3, rng)
    assert np.allclose(apply_local(v, psi, [2, 3], [1]), np.kron(np.eye(2), v) @ psi, atol=1e-12)


def test_random_reflection_is_reflection(rng):
    for dim in (1, 2, 5):
        as_reflection(random_reflection(dim, rng))


def test_as_reflection_rejects_non_reflection():
    with pytest.raises(ValidationError):
        as_reflection(0.5 * Z)


def test_superoperator_rejects_non_trace_preserving():
    with pytest.raises(ValidationError):
        SuperOperator((0.5 * np.eye(2),))


@pytest.mark.parametrize("trial", range(25))
def test_superoperators_contract_trace_distance(trial, make_rng):
    rng = make_rng(f"contract/{trial}")
    channel = random_superoperator(3, 2, 3, rng)
    rho = random_density(3, rng)
    sigma = random_density(3, rng, rank=1)
    before = trace_norm(rho - sigma)
    after = trace_norm(channel.apply(rho) - channel.apply(sigma))
    assert after <= before + 1e-9


def test_kron_of_paulis():
    assert np.allclose(kron(X, Z), np.kron(X, Z))


# --- qubit register ---
def test_register_measures_epr_pairs_consistently(rng):
    register = epr_register(range(20))
    for j in range(20):
        a = register.measure_reflections([("A", j)], [Z], rng)[0]
        assert register.measure_reflections([("B", j)], [Z], rng)[0] == a


def test_register_merges_groups_on_joint_measurement(rng):
    register = epr_register(range(3))
    assert register.group_sizes() == [2, 2, 2]
    register.measure_reflections([("A", 0), ("A", 1)], [kron(X, X), kron(Z, Z)], rng)
    assert sorted(register.group_sizes()) == [2, 4]
    # Alice's Bell measurement swaps the entanglement onto Bob's halves
    bob = register.reduced([("B", 0), ("B", 1)])
    assert np.trace(bob @ bob).real == pytest.approx(1)


def test_register_reduced_state_follows_label_order():
    register = QubitRegister()
    register.add(["p", "q"], np.kron(KET0, np.array([0, 1])))
    assert np.allclose(register.reduced(["q", "p"]), outer(np.kron(np.array([0, 1]), KET0)))


def test_register_release_and_branches():
    register = epr_register([0])
    register.add(["c"], KET0)
    assert np.allclose(np.abs(register.release(["c"])), KET0)
    assert "c" not in register
    with pytest.raises(ValidationError):
        register.release([("A", 0)])
    branches = register.branches([("A", 0)], [reflection_projector(Z, 0), reflection_projector(Z, 1)])
    assert [(k, round(p, 12)) for k, p, _ in branches] == [(0, 0.5), (1, 0.5)]
    assert np.allclose(branches[1][2].reduced([("B", 0)]), outer(np.array([0, 1])))
    assert np.allclose(register.reduced([("B", 0)]), np.eye(2) / 2)


def test_register_validation():
    register = QubitRegister(cap=4)
    register.add([0, 1], EPR)
    register.add([2, 3], EPR)
    register.add([4], KET0)
    with pytest.raises(ValidationError):
        register.add([0], KET0)
    with pytest.raises(DimensionError):
        register.add([5], EPR)
    with pytest.raises(ValidationError):
        register.apply([9], X)
    with pytest.raises(CapacityError):
        register.apply([0, 2, 4], np.eye(8))
    with pytest.raises(ValidationError):
        register.measure([4], [reflection_projector(X, 0)], np.random.default_rng(0))
