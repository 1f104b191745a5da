# test_teleport.py

import math

import numpy as np
import pytest

from chshlab.errors import CapacityError, CircuitSyntaxError, DeviceViolation, ValidationError
from chshlab.linalg.operators import CNOT, EPR, G, H, I2, KET0, dagger, embed, kron, outer, random_state
from chshlab.linalg.pauli import LETTER_MATRICES, PauliString, all_strings
from chshlab.linalg.register import QubitRegister, epr_register
from chshlab.rng import stream
from chshlab.teleport import (
    BELL_PROJECTORS, BLOCK_QUBITS, SLOT_ORDER, SLOT_POSITIONS, AdaptiveBranch, BellMeasure, Circuit,
    ComputeAlice, HonestComputeAlice, HonestComputeBob, NoisyComputeBob, PauliFrame, Prepare,
    all_circuits, block_count, block_state, compile_circuit, decode_outcome, direct_simulate,
    encode_outcome, equivalence_check, exact_distribution, execute, final_state, format_circuit,
    frame_conjugate, gadget_basis, honest_bob_block, outcome_bits, outcome_pauli, parse_circuit,
    random_circuit, resource_states, run_schedule, sample_outputs, slot_basis,
)
from chshlab.teleport.frame import OMEGA

GATES = {"I": I2, "H": H, "G": G}


def within_4_sigma(freq, p, samples):
    return abs(freq - p) <= 4 * math.sqrt(p * (1 - p) / samples) + 1e-12


# --- frames ---
@pytest.mark.parametrize("phase", [0, 3, 6])
def test_hadamard_conjugation_is_exact(phase):
    for p in all_strings(2):
        frame = PauliFrame(p.letters, phase)
        image, correction = frame_conjugate(frame, "H", [1])
        u = kron(I2, H)
        assert not correction
        assert np.allclose(image.matrix(), u @ frame.matrix() @ dagger(u), atol=1e-12)


@pytest.mark.parametrize("targets", [(0, 1), (1, 0), (2, 0)])
def test_cnot_conjugation_is_exact(targets):
    u = embed(CNOT, [2] * 3, list(targets))
    for p in all_strings(3):
        frame = PauliFrame(p.letters, 1)
        image, correction = frame_conjugate(frame, "CNOT", targets)
        assert not correction
        assert np.allclose(image.matrix(), u @ frame.matrix() @ dagger(u), atol=1e-12)


def test_g_rule_table():
    expected = {"I": False, "X": True, "Y": False, "Z": True}
    for letter, correction in expected.items():
        frame = PauliFrame(letter)
        image, needed = frame_conjugate(frame, "G", [0])
        assert needed == correction
        assert np.allclose(image.matrix(), G @ LETTER_MATRICES[letter] @ dagger(G), atol=1e-12)

    assert frame_conjugate(PauliFrame("I"), "G", [0])[0] == PauliFrame("I")
    assert frame_conjugate(PauliFrame("Y"), "G", [0])[0] == PauliFrame("Y")
    # G Z G† = H
    residual = frame_conjugate(PauliFrame("Z"), "G", [0])[0]
    assert residual.letters == "I" and residual.hadamards == (True,)
    assert np.allclose(residual.matrix(), H)
    # G X G† = i H Y
    assert np.allclose(frame_conjugate(PauliFrame("X"), "G", [0])[0].matrix(), OMEGA ** 2 * H @ LETTER_MATRICES["Y"])


def test_pending_hadamard_blocks_further_gates():
    frame, _ = frame_conjugate(PauliFrame("ZI"), "G", [0])
    assert frame.pending
    with pytest.raises(ValidationError):
        frame_conjugate(frame, "H", [0])
    with pytest.raises(ValidationError):
        frame.left_multiply(PauliString("X"), [0])
    with pytest.raises(ValidationError):
        frame.x_bit(0)
    frame_conjugate(frame, "H", [1])


def test_left_multiply_and_settle_match_matrices():
    for p in all_strings(1):
        for q in all_strings(1):
            for phase in (0, 1):
                decorated = PauliString(q.letters, phase)
                frame = PauliFrame(p.letters, 5)
                assert np.allclose(frame.left_multiply(decorated, [0]).matrix(), decorated.matrix() @ frame.matrix())
                pending = PauliFrame(p.letters, 2, (True,))
                settled = pending.settle(decorated, 0)
                assert not settled.pending
                assert np.allclose(settled.matrix(), H @ decorated.matrix() @ pending.matrix())


def test_bell_outcomes_leave_the_conjugate_pauli():
    assert outcome_pauli(3) == PauliString("Y", 2)
    assert [outcome_pauli(k).letters for k in range(4)] == ["I", "X", "Z", "Y"]


def test_teleportation_identity(make_rng):
    rng = make_rng("teleport-identity")
    for trial in range(50):
        phi = random_state(2, rng)
        name = "IHG"[trial % 3]
        u = GATES[name]
        register = QubitRegister()
        register.add(["c"], phi)
        register.add([("r", 0), ("r", 1)], kron(I2, u) @ EPR)
        branches = register.branches(["c", ("r", 0)], BELL_PROJECTORS)
        assert len(branches) == 4
        for k, pk, child in branches:
            assert pk == pytest.approx(0.25, abs=1e-12)
            child.release(["c", ("r", 0)])
            out = child.release([("r", 1)])
            expected = u @ outcome_pauli(k).matrix() @ phi
            assert abs(np.vdot(out, expected)) == pytest.approx(1, abs=1e-10)


# --- resources ---
def test_hadamard_resource_amplitudes():
    assert np.allclose(resource_states()["H"][0].state, np.array([1, 1, 1, -1]) / 2)


def test_resource_families_are_orthonormal_and_decorated_exactly():
    cnot = embed(CNOT, [2] * 4, [1, 3])
    for slot, family in resource_states().items():
        m = np.stack([r.state for r in family], axis=1)
        assert np.allclose(m.conj().T @ m, np.eye(len(family)), atol=1e-10)
        for r in family:
            d = r.decoration.matrix()
            if slot == "prep":
                expected = d @ KET0
            elif slot == "CNOT":
                expected = cnot @ embed(d, [2] * 4, [1, 3]) @ np.kron(EPR, EPR)
            else:
                expected = kron(I2, GATES[slot] @ d) @ EPR
            assert np.allclose(r.state, expected, atol=1e-12)


def test_gadget_layout():
    assert gadget_basis().q == BLOCK_QUBITS
    assert [r.start for r in gadget_basis().ranges()] == [SLOT_POSITIONS[s][0] for s in SLOT_ORDER]
    assert slot_basis("CNOT").q == 4 and len(slot_basis("G")) == 4


def test_outcome_codec(rng):
    for outcome in rng.integers(2 ** BLOCK_QUBITS, size=20):
        resources = decode_outcome(int(outcome))
        assert encode_outcome({s: r.digit for s, r in resources.items()}) == outcome
        bits = outcome_bits(int(outcome))
        assert len(bits) == 11 and int("".join(map(str, bits)), 2) == outcome
    with pytest.raises(ValidationError):
        outcome_bits(2 ** 11)


def test_honest_block_collapse():
    for seed in range(6):
        bits, state = honest_bob_block(seed)
        outcome = int("".join(map(str, bits)), 2)
        assert abs(np.vdot(block_state(outcome), state)) ** 2 == pytest.approx(1, abs=1e-10)
        prep = decode_outcome(outcome)["prep"]
        assert np.allclose(prep.state, prep.decoration.matrix() @ KET0)


def test_honest_block_outcomes_are_uniform():
    register = epr_register(range(BLOCK_QUBITS))
    total = 1.0
    for slot in SLOT_ORDER:
        labels = [("B", j) for j in SLOT_POSITIONS[slot]]
        p = register.probabilities(labels, slot_basis(slot).projectors())
        assert np.allclose(p, 1 / len(p))
        total *= p[0]
    assert total == pytest.approx(2.0 ** -11)


# --- circuits ---
def test_parse_format_round_trip(rng):
    for n in (1, 2, 3):
        circuit = random_circuit(n, 6, rng)
        assert parse_circuit(format_circuit(circuit)) == circuit
    text = "# demo\nqubits 2\n\nG 0   # rotate\nCNOT 0 1\nmeasure 1 0\n"
    circuit = parse_circuit(text)
    assert circuit.measured == (1, 0) and circuit.counts() == {"H": 0, "G": 1, "CNOT": 1}
    assert format_circuit(circuit).endswith("measure 1 0\n")
    silent = parse_circuit("qubits 1\nG 0\nmeasure none\n")
    assert silent.measured == ()
    assert format_circuit(silent).endswith("measure none\n")


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("qubits 2\nH 5\nmeasure all\n", 2, 3),
        ("qubits 1\nT 0\nmeasure all\n", 2, 1),
        ("qubits 2\n  CNOT 1 1\nmeasure all\n", 2, 10),
        ("qubits 1\nH x\nmeasure all\n", 2, 3),
        ("qubits 1\nH 0\n", 3, 1),
        ("H 0\nmeasure all\n", 1, 1),
        ("qubits 1\nmeasure all\nH 0\n", 3, 1),
        ("qubits 0\nmeasure all\n", 1, 8),
    ],
)
def test_parse_errors_report_position(text, line, column):
    with pytest.raises(CircuitSyntaxError) as err:
        parse_circuit(text)
    assert (err.value.line, err.value.column) == (line, column)
    assert err.value.args[0].startswith(f"line {line}, column {column}")


def test_circuit_validation():
    with pytest.raises(ValidationError):
        Circuit.build(2, ("CNOT", 0, 0))
    with pytest.raises(ValidationError):
        Circuit.build(1, ("H", 1))
    with pytest.raises(ValidationError):
        Circuit.build(1, ("T", 0))
    with pytest.raises(ValidationError):
        Circuit.build(2, ("H", 0), measured=(1, 1))


def test_direct_simulation_examples():
    assert direct_simulate(Circuit.build(1, ("H", 0))) == pytest.approx({"0": 0.5, "1": 0.5})
    g = direct_simulate(Circuit.build(1, ("G", 0)))
    assert g == pytest.approx({"0": np.cos(np.pi / 8) ** 2, "1": np.sin(np.pi / 8) ** 2})
    assert direct_simulate(Circuit(2)) == {"00": 1.0}
    assert direct_simulate(Circuit.build(1, *[("G", 0)] * 4)) == pytest.approx({"1": 1.0})
    assert direct_simulate(Circuit.build(1, *[("G", 0)] * 2)) == pytest.approx({"0": 0.5, "1": 0.5})
    assert direct_simulate(Circuit.build(2, *[("G", 0)] * 4, measured=(1, 0))) == pytest.approx({"01": 1.0})
    with pytest.raises(CapacityError):
        direct_simulate(Circuit(13))


# --- compiler ---
def test_schedule_examples():
    schedule = compile_circuit(Circuit(1))
    assert schedule.instructions == (Prepare(0, 0), BellMeasure((0,), 1, "readout"))
    assert schedule.blocks_used == 2

    schedule = compile_circuit(Circuit.build(1, ("G", 0)))
    assert schedule.blocks_used == 4 and schedule.adaptive_count == 1
    assert schedule.instructions[2] == AdaptiveBranch(0, 2)

    schedule = compile_circuit(Circuit.build(2, ("CNOT", 1, 0)))
    assert BellMeasure((1, 0), 2, "CNOT") in schedule.instructions
    assert schedule.bell_measurements() == 2 + 2


def test_block_accounting(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        circuit = random_circuit(n, int(rng.integers(0, 13)), rng)
        counts = circuit.counts()
        expected = n + counts["H"] + counts["CNOT"] + n + 2 * counts["G"]
        assert compile_circuit(circuit).blocks_used == block_count(circuit) == expected


# --- execution ---
def test_hadamard_output_is_uniform():
    samples = 10_000
    dist = sample_outputs(Circuit.build(1, ("H", 0)), samples, seed=3)
    assert within_4_sigma(dist.get("1", 0.0), 0.5, samples)


def test_cnot_outputs_agree():
    dist = sample_outputs(Circuit.build(2, ("H", 0), ("CNOT", 0, 1)), 300, seed=4)
    assert set(dist) <= {"00", "11"}
    assert sample_outputs(Circuit.build(2, ("CNOT", 0, 1)), 50, seed=4) == {"00": 1.0}


def test_g_to_the_fourth_reads_one():
    circuit = Circuit.build(1, *[("G", 0)] * 4)
    assert exact_distribution(circuit) == pytest.approx({"1": 1.0})
    for seed in range(3):
        result = execute(circuit, seed=seed)
        assert result.output == "1"
        assert result.blocks_used == 10 and len(result.frames) == 10


def test_carried_state_is_frame_times_ideal():
    circuit = Circuit.build(2, ("G", 0), ("CNOT", 0, 1), ("H", 1), ("G", 1), measured=())
    schedule = compile_circuit(circuit)
    ideal = outer(final_state(circuit))
    for seed in range(4):
        register = QubitRegister()
        result = run_schedule(
            schedule, HonestComputeAlice(), HonestComputeBob(), stream(seed, "carried"), register=register
        )
        f = result.frames[-1].matrix()
        rho = register.reduced([result.carriers[0], result.carriers[1]])
        assert np.allclose(rho, f @ ideal @ dagger(f), atol=1e-10)


def test_both_correction_slots_are_used():
    slots = set()
    for seed in range(12):
        transcript = execute(Circuit.build(1, ("H", 0), ("G", 0)), seed=seed, entangled_bob=False).transcript
        slots |= {entry[2] for entry in transcript if entry[0] == "A"}
    assert {"I", "H"} <= slots


@pytest.mark.parametrize("seed", range(4))
def test_exhaustive_single_qubit_equivalence(seed):
    circuits = all_circuits(1, 3)
    assert len(circuits) == 15
    for circuit in circuits:
        report = equivalence_check(circuit, seed=seed)
        assert report.mode == "exact" and report.passed, format_circuit(circuit)
        assert report.total_variation <= 1e-9


def test_random_two_qubit_equivalence(rng):
    for _ in range(20):
        circuit = random_circuit(2, int(rng.integers(1, 6)), rng)
        report = equivalence_check(circuit, seed=int(rng.integers(1000)))
        assert report.passed and report.total_variation <= 1e-9, format_circuit(circuit)


def test_sampled_equivalence_on_four_qubits(make_rng):
    circuit = random_circuit(4, 6, make_rng("four-qubit-circuit"))
    report = equivalence_check(circuit, samples=2000, seed=1)
    assert report.mode == "sampled" and report.passed
    assert report.blocks_used == block_count(circuit)


class LoudAlice(ComputeAlice):
    def bell_measure(self, register, labels, rng):
        return 7


def test_device_and_capacity_errors():
    with pytest.raises(DeviceViolation):
        execute(Circuit(1), alice=LoudAlice())
    with pytest.raises(CapacityError):
        execute(Circuit(5))
    with pytest.raises(CapacityError):
        exact_distribution(Circuit(3))
    with pytest.raises(ValidationError):
        equivalence_check(Circuit(1), mode="bogus")


def test_garbled_reports_break_the_computation():
    circuit = Circuit.build(1, *[("G", 0)] * 4)
    dist = sample_outputs(circuit, 200, seed=2, bob=NoisyComputeBob(1.0))
    assert dist.get("1", 0.0) < 0.8
    assert sample_outputs(circuit, 50, seed=2, bob=NoisyComputeBob(0.0)) == {"1": 1.0}
    with pytest.raises(ValidationError):
        NoisyComputeBob(1.5)
