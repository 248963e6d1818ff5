import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import dense_circuit, dense_gate, random_state
from qschrod.errors import DomainError, UnreachableOutcomeError
from qschrod.register import (
    Circuit,
    GateOp,
    StateVector,
    apply_circuit,
    apply_gate,
    basis_state,
    circuit_unitary,
    condition_on_outcome,
    controlled_phase,
    global_phase,
    hadamard,
    marginal_probabilities,
    parse_gate,
    format_gate,
    pauli_x,
    phase_rotation,
    register_distribution,
    reverse_qubits,
    sample_outcomes,
)


@st.composite
def gates(draw, nq=4):
    kind = draw(st.sampled_from(["phase", "x", "h", "global", "reverse"]))
    if kind == "reverse":
        qs = draw(st.permutations(range(nq)))
        k = draw(st.integers(1, nq))
        return reverse_qubits(qs[:k])
    qs = draw(st.permutations(range(nq)))
    angle = draw(st.floats(-2 * math.pi, 2 * math.pi, allow_nan=False))
    if kind == "h":
        return hadamard(qs[0])
    nctl = draw(st.integers(0, nq - 1))
    pols = draw(st.lists(st.integers(0, 1), min_size=nctl, max_size=nctl))
    ctl = list(zip(qs[1 : 1 + nctl], pols))
    if kind == "x":
        return pauli_x(qs[0], ctl)
    if kind == "phase":
        return controlled_phase(angle, ctl, qs[0])
    return global_phase(angle, ctl)


@st.composite
def circuits(draw, nq=4):
    return Circuit(nq, draw(st.lists(gates(nq), max_size=12)))


@given(gates())
@settings(max_examples=200, deadline=None)
def test_gate_matches_kron_oracle(g):
    assert np.allclose(circuit_unitary(Circuit(4, [g])), dense_gate(g, 4), atol=1e-12)


@given(circuits())
@settings(max_examples=60, deadline=None)
def test_circuit_inverse_is_identity(circ):
    u = circuit_unitary(circ + circ.inverse())
    assert np.allclose(u, np.eye(16), atol=1e-12)


@given(circuits(), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_circuits_preserve_norm(circ, seed):
    psi = random_state(np.random.default_rng(seed), 16)
    out = apply_circuit(StateVector(psi), circ)
    assert abs(out.norm() - 1) < 1e-10
    assert np.allclose(out.amplitudes, dense_circuit(circ) @ psi, atol=1e-12)


def test_phase_only_touches_one():
    out = apply_gate(basis_state(1, 1), phase_rotation(0.3, 0))
    assert np.allclose(out.amplitudes, [0, np.exp(0.3j)])
    out = apply_gate(basis_state(1, 0), phase_rotation(0.3, 0))
    assert np.allclose(out.amplitudes, [1, 0])


def test_msb_ordering():
    # X on qubit 0 of |00> gives |10> = index 2
    out = apply_gate(basis_state(2, 0), pauli_x(0))
    assert out.amplitudes[2] == 1


def test_zero_polarity_control():
    g = pauli_x(1, [(0, 0)])
    assert apply_gate(basis_state(2, 0), g).amplitudes[1] == 1
    assert apply_gate(basis_state(2, 2), g).amplitudes[2] == 1


def test_controls_accept_dict_and_int():
    assert pauli_x(2, {0: 1, 1: 0}).controls == ((0, 1), (1, 0))
    assert controlled_phase(0.1, 1, 0).controls == ((1, 1),)


def test_gate_validation():
    with pytest.raises(DomainError):
        controlled_phase(0.1, [1], 1)
    with pytest.raises(DomainError):
        pauli_x(0, [(1, 2)])
    with pytest.raises(DomainError):
        GateOp("cz", 0)
    with pytest.raises(DomainError):
        apply_gate(basis_state(2, 0), hadamard(5))


def test_circuit_width_checked():
    with pytest.raises(DomainError):
        Circuit(2, [hadamard(3)])
    with pytest.raises(DomainError):
        apply_circuit(basis_state(3, 0), Circuit(2))


def test_statevector_read_only_and_power_of_two():
    s = basis_state(2, 1)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1
    with pytest.raises(DomainError):
        StateVector(np.ones(3))


def test_marginal_matches_brute_force(rng):
    psi = StateVector(random_state(rng, 256))
    subset = [6, 1, 3, 4]
    p = marginal_probabilities(psi, subset)
    want = np.zeros(16)
    for i, a in enumerate(psi.amplitudes):
        bits = format(i, "08b")
        key = int("".join(bits[q] for q in subset), 2)
        want[key] += abs(a) ** 2
    assert np.allclose(p, want, atol=1e-14)
    assert abs(p.sum() - 1) < 1e-12


def test_register_distribution_keys():
    d = register_distribution(basis_state(3, 0b101), [2, 0])
    assert d["11"] == pytest.approx(1.0)
    assert set(d) == {"00", "01", "10", "11"}


def test_condition_on_outcome(rng):
    psi = StateVector(random_state(rng, 16))
    sub, p = condition_on_outcome(psi, [0], "1")
    assert p == pytest.approx(np.sum(np.abs(psi.amplitudes[8:]) ** 2))
    assert np.allclose(sub.amplitudes, psi.amplitudes[8:] / math.sqrt(p))
    sub2, _ = condition_on_outcome(psi, [0], 1)
    assert np.allclose(sub.amplitudes, sub2.amplitudes)


def test_condition_unreachable():
    with pytest.raises(UnreachableOutcomeError):
        condition_on_outcome(basis_state(2, 0), [0], "1")
    with pytest.raises(DomainError):
        condition_on_outcome(basis_state(2, 0), [0, 1], "00")


def test_sampling_is_seeded():
    psi = apply_circuit(basis_state(2, 0), Circuit(2, [hadamard(0), hadamard(1)]))
    a = sample_outcomes(psi, [0, 1], 4000, seed=7)
    assert a == sample_outcomes(psi, [0, 1], 4000, seed=7)
    assert sum(a.values()) == 4000
    assert all(abs(c / 4000 - 0.25) < 0.03 for c in a.values())


def test_dump_parse_round_trip():
    circ = Circuit(
        4,
        [
            hadamard(0),
            controlled_phase(math.pi / 7, [(1, 0), 2], 3),
            global_phase(-1.25, [(0, 1)]),
            global_phase(0.5),
            reverse_qubits([0, 1, 2, 3]),
        ],
    )
    again = Circuit.parse(circ.dump(), 4)
    assert again.gates == circ.gates
    assert format_gate(parse_gate("PHASE 3 [0:1] 0.25")) == "PHASE 3 [0:1] 0.25"
    with pytest.raises(DomainError):
        parse_gate("PHASE x")


def test_remap_moves_gates():
    circ = Circuit(2, [pauli_x(1, [0])]).remap([3, 1], 4)
    assert circ.gates[0].target == 1
    assert circ.gates[0].controls == ((3, 1),)


def test_batched_unitary_columns():
    u = circuit_unitary(Circuit(2, [pauli_x(1, [0])]))
    # CNOT with control MSB: |10> -> |11>
    assert u[3, 2] == 1 and u[2, 3] == 1
