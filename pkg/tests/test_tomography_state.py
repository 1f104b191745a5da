# test_tomography_state.py

import numpy as np
import pytest
from scipy.stats import chisquare, ortho_group

from chshlab.errors import DeviceViolation, DimensionError, ValidationError
from chshlab.linalg.operators import CNOT, EPR, H, I2, KET0, KET1, SWAP, X, Y, Z, G, kron, outer
from chshlab.linalg.pauli import PauliString
from chshlab.linalg.register import epr_register
from chshlab.tomography.state import (
    ConstantOutcomeBob, HonestStateBob, IdealStateAlice, NoisyStateBob, ProductBasis,
    ShuffledAnswersAlice, StateBob, StateAlice, StateTomographyRun, accept_state_tomography,
    compute_estimators, ideal_tau_expectation, product_tomography_verdict, run_state_tomography,
    slot_run, state_tomography_verdict,
)
from chshlab.tomography.xz import (
    XZBasisSet, closure_conjugate, closure_tensor, pauli_coordinate, real_phase,
    stabilizer_xz_basis, xz_strings,
)

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
BELL = stabilizer_xz_basis("bell-real")


def same_up_to_phase(u, v):
    return abs(abs(np.vdot(u, v)) - 1) < 1e-10


# --- coordinates ---
def test_coordinates_of_simple_states():
    for p in xz_strings(2)[1:]:
        assert pauli_coordinate(np.eye(4) / 4, p) == pytest.approx(0, abs=1e-15)
    assert pauli_coordinate(outer(KET0), PauliString("Z")) == pytest.approx(1)


def test_coordinate_matches_direct_trace():
    rho = (I2 + (X + Z) / np.sqrt(2)) / 2
    for p in xz_strings(1):
        assert pauli_coordinate(rho, p) == pytest.approx(np.trace(rho @ p.matrix()).real, abs=1e-15)
    assert pauli_coordinate(rho, PauliString("X")) == pytest.approx(1 / np.sqrt(2))


def test_coordinate_dimension_mismatch():
    with pytest.raises(DimensionError):
        pauli_coordinate(np.eye(2) / 2, PauliString("XX"))


# --- bases ---
def test_computational_basis():
    basis = stabilizer_xz_basis("computational")
    assert basis.q == 1 and len(basis) == 2
    assert np.allclose(basis.states[0], KET0) and np.allclose(basis.states[1], KET1)


def test_bell_basis_with_hadamard():
    basis = stabilizer_xz_basis("bell-real", H)
    m = np.stack(basis.states, axis=1)
    assert np.allclose(m.conj().T @ m, np.eye(4), atol=1e-12)
    assert np.allclose(m.imag, 0)
    assert same_up_to_phase(basis.states[0], kron(H, I2) @ EPR)


def test_bell_basis_phase_fixes_the_y_state():
    # (I⊗Y)|EPR⟩ has imaginary amplitudes until its global phase is removed
    assert np.allclose(BELL.states[3].imag, 0)
    assert same_up_to_phase(BELL.states[3], kron(I2, Y) @ EPR)


def test_double_bell_cnot_basis_is_orthonormal():
    basis = stabilizer_xz_basis("double-bell-cnot")
    m = np.stack(basis.states, axis=1)
    assert basis.q == 4 and m.shape == (16, 16)
    assert np.allclose(m.conj().T @ m, np.eye(16), atol=1e-12)


def test_basis_rejections():
    with pytest.raises(ValidationError):
        stabilizer_xz_basis("bell-real", np.diag([1, 1j]))
    with pytest.raises(ValidationError):
        stabilizer_xz_basis("bell-real", np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValidationError):
        stabilizer_xz_basis("ghz")
    with pytest.raises(ValidationError):
        XZBasisSet(1, (KET0, PLUS))
    with pytest.raises(ValidationError):
        XZBasisSet(1, ((KET0 + 1j * KET1) / np.sqrt(2), (KET0 - 1j * KET1) / np.sqrt(2)))
    with pytest.raises(DimensionError):
        XZBasisSet(2, (KET0, KET1))


def test_real_phase():
    assert np.allclose(real_phase(1j * PLUS), PLUS)
    with pytest.raises(ValidationError):
        real_phase((KET0 + 1j * KET1) / np.sqrt(2))


# --- closure ---
def test_tensor_of_states():
    result = closure_tensor(KET0, PLUS)
    assert result.rule == "tensor"
    assert np.allclose(result.result, np.kron(KET0, PLUS))


def test_tensor_of_bases():
    result = closure_tensor(stabilizer_xz_basis("computational"), BELL).result
    assert result.q == 3 and len(result) == 8
    with pytest.raises(ValidationError):
        closure_tensor(BELL, KET0)


def test_pauli_conjugate():
    result = closure_conjugate(PLUS, Y)
    assert result.rule == "pauli"
    assert same_up_to_phase(result.result, MINUS)


def test_real_local_conjugate():
    result = closure_conjugate(np.kron(KET0, KET0), H, [1])
    assert result.rule == "real-local-unitary"
    assert np.allclose(result.result, np.kron(KET0, PLUS))
    with pytest.raises(ValidationError):
        closure_conjugate(KET0, np.diag([1, np.exp(0.3j)]))


def test_cnot_conjugate_of_css_state():
    result = closure_conjugate(np.kron(PLUS, KET0), CNOT)
    assert result.rule == "cnot"
    assert np.allclose(result.result, EPR)
    basis = closure_conjugate(stabilizer_xz_basis("computational"), H).result
    assert closure_conjugate(closure_tensor(basis, basis).result, CNOT).rule == "cnot"


def test_disallowed_conjugations():
    with pytest.raises(ValidationError, match="need not"):
        closure_conjugate(np.kron(KET0, KET0), SWAP)
    with pytest.raises(ValidationError):
        closure_conjugate(np.kron(G @ KET0, KET0), CNOT)
    with pytest.raises(DimensionError):
        closure_conjugate(KET0, CNOT)


# --- runs ---
def honest_run(n, seed, basis=BELL):
    return run_state_tomography(IdealStateAlice(), HonestStateBob(basis), basis.q, n, seed=seed)


def test_runs_repeat_with_the_seed():
    a, b = honest_run(64, 3), honest_run(64, 3)
    assert np.array_equal(a.sigma, b.sigma)
    assert np.array_equal(a.alice_answers, b.alice_answers)
    assert np.array_equal(a.bob_outcomes, b.bob_outcomes)
    assert not np.array_equal(honest_run(64, 4).bob_outcomes, a.bob_outcomes)


def test_run_shape():
    run = run_state_tomography(IdealStateAlice(), HonestStateBob(BELL), 2, 50, m=130, seed=1)
    assert run.m == 130 and run.sigma.size == 100 and len(set(run.sigma.tolist())) == 100
    assert run.alice_questions.shape == (130,) and run.bob_outcomes.shape == (50,)
    with pytest.raises(ValidationError):
        run_state_tomography(IdealStateAlice(), HonestStateBob(BELL), 2, 50, m=99)


def test_honest_outcomes_are_uniform():
    run = honest_run(4096, 0)
    counts = np.bincount(run.bob_outcomes, minlength=4)
    assert chisquare(counts).pvalue > 1e-3


def test_honest_answers_are_correlated_with_bob():
    # Bob's outcome 0 is |EPR⟩, stabilized by XX and ZZ
    run = honest_run(256, 5)
    for j in np.flatnonzero(run.bob_outcomes == 0):
        a, b = run.chunk(j)
        if run.alice_questions[a] == run.alice_questions[b]:
            assert run.alice_answers[a] == run.alice_answers[b]


def test_records():
    run = honest_run(8, 2)
    records = run.records()
    assert len(records) == run.m + run.n
    assert records[0].line().startswith("round=0 recipient=A question=")
    assert records[-1].recipient == "B" and records[-1].question == "{},{}".format(*run.chunk(7))


class LoudAlice(StateAlice):
    def answer(self, j, question, register, rng):
        return 2


class WideBob(StateBob):
    def report(self, j, chunk, register, rng):
        return 4


def test_device_violations():
    with pytest.raises(DeviceViolation):
        run_state_tomography(LoudAlice(), HonestStateBob(BELL), 2, 4)
    with pytest.raises(DeviceViolation):
        run_state_tomography(IdealStateAlice(), WideBob(), 2, 4)


def test_run_validation():
    with pytest.raises(ValidationError):
        StateTomographyRun(1, 2, 2, np.array([0, 0]), np.zeros(2, int), np.zeros(2, int), np.zeros(2, int))
    with pytest.raises(DimensionError):
        StateTomographyRun(1, 2, 2, np.array([0, 1]), np.zeros(3, int), np.zeros(2, int), np.zeros(2, int))


# --- estimators ---
def test_hand_built_estimators():
    run = StateTomographyRun(
        1, 2, 2, np.array([0, 1]), np.array([0, 1]), np.array([0, 1]), np.array([0, 1])
    )
    est = compute_estimators(run)
    assert list(est.counts) == [1, 1]
    assert est.value(0, "I") == pytest.approx(1) and est.value(1, "I") == pytest.approx(1)
    # round 0 asked Z on pair 0 and saw +1; round 1 asked X on pair 1 and saw −1
    assert est.value(0, "Z") == pytest.approx(2) and est.value(1, "Z") == pytest.approx(0)
    assert est.value(1, "X") == pytest.approx(-2) and est.value(0, "X") == pytest.approx(0)


def test_identity_estimator_is_the_outcome_frequency():
    run = honest_run(512, 7)
    est = compute_estimators(run)
    assert est.counts.sum() == 512
    for o in range(4):
        assert est.value(o, "II") == pytest.approx(4 * est.counts[o] / 512, abs=1e-12)
    assert len(est.records()) == 4 * 9


@pytest.mark.parametrize("basis", [
    stabilizer_xz_basis("computational"), BELL, stabilizer_xz_basis("bell-real", H),
])
def test_exact_expectation_equals_pauli_coordinate(basis):
    for o in range(len(basis)):
        for p in xz_strings(basis.q):
            assert ideal_tau_expectation(basis, o, p) == pytest.approx(basis.coordinate(o, p), abs=1e-12)


@pytest.mark.parametrize("q", [1, 2])
def test_exact_expectation_for_random_real_bases(q, make_rng):
    m = ortho_group.rvs(2 ** q, random_state=make_rng(f"ortho/{q}"))
    basis = XZBasisSet(q, tuple(m[:, k] for k in range(2 ** q)))
    for o in range(2 ** q):
        for p in xz_strings(q):
            assert ideal_tau_expectation(basis, o, p) == pytest.approx(basis.coordinate(o, p), abs=1e-12)


# --- acceptance ---
def test_honest_provers_are_accepted():
    accepted = sum(accept_state_tomography(compute_estimators(honest_run(4096, seed)), BELL) for seed in range(50))
    assert accepted / 50 >= 0.95


def test_constant_bob_fails_the_count_test():
    run = run_state_tomography(IdealStateAlice(), ConstantOutcomeBob(1), 2, 4096, seed=1)
    verdict = state_tomography_verdict(compute_estimators(run), BELL)
    assert not verdict.accepted
    assert verdict.count_gap == pytest.approx(3072)
    assert verdict.count_gap > verdict.count_threshold


@pytest.mark.parametrize("seed", range(3))
def test_shuffled_answers_fail_the_tau_test(seed):
    run = run_state_tomography(ShuffledAnswersAlice(), HonestStateBob(BELL), 2, 4096, seed=seed)
    verdict = state_tomography_verdict(compute_estimators(run), BELL)
    assert verdict.count_gap <= verdict.count_threshold
    assert verdict.tau_gap > verdict.tau_threshold
    assert not verdict.accepted


def test_dishonest_provers_are_rejected_across_seeds():
    constant = sum(
        not accept_state_tomography(
            compute_estimators(run_state_tomography(IdealStateAlice(), ConstantOutcomeBob(1), 2, 4096, seed=seed)), BELL
        )
        for seed in range(50)
    )
    shuffled = sum(
        not accept_state_tomography(
            compute_estimators(run_state_tomography(ShuffledAnswersAlice(), HonestStateBob(BELL), 2, 4096, seed=seed)), BELL
        )
        for seed in range(50)
    )
    assert constant >= 48
    assert shuffled >= 48


def test_fully_noisy_bob_is_rejected():
    run = run_state_tomography(IdealStateAlice(), NoisyStateBob(BELL, 1.0), 2, 4096, seed=2)
    assert not accept_state_tomography(compute_estimators(run), BELL)
    with pytest.raises(ValidationError):
        NoisyStateBob(BELL, -0.1)


def test_acceptance_checks_round_count():
    est = compute_estimators(honest_run(64, 0))
    with pytest.raises(ValidationError):
        accept_state_tomography(est, BELL, n=65)
    with pytest.raises(DimensionError):
        state_tomography_verdict(est, stabilizer_xz_basis("computational"))


# --- product bases ---
def test_product_digits():
    basis = ProductBasis((stabilizer_xz_basis("computational"), BELL))
    assert basis.q == 3 and [list(r) for r in basis.ranges()] == [[0], [1, 2]]
    assert basis.split(6) == (1, 2)
    assert basis.merge((1, 2)) == 6


def test_per_slot_tomography():
    basis = ProductBasis((stabilizer_xz_basis("computational"), BELL))
    run = run_state_tomography(IdealStateAlice(), HonestStateBob(basis), 3, 4096, seed=4)
    assert product_tomography_verdict(run, basis).accepted
    second = slot_run(run, basis, 1)
    assert second.q == 2 and second.sigma.size == 2 * 4096
    assert accept_state_tomography(compute_estimators(second), BELL)

    cheat = run_state_tomography(IdealStateAlice(), ConstantOutcomeBob(0), 3, 4096, seed=4)
    verdict = product_tomography_verdict(cheat, basis)
    assert verdict.kind == "state-per-slot" and not verdict.accepted


def test_register_is_shared_when_given():
    register = epr_register(range(8))
    run_state_tomography(IdealStateAlice(), HonestStateBob(stabilizer_xz_basis("computational")), 1, 8, register=register)
    assert len(register.labels) == 16
