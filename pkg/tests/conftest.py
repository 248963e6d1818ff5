import math
import warnings
from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
P0 = np.diag([1.0, 0.0]).astype(complex)
P1 = np.diag([0.0, 1.0]).astype(complex)


def kron_all(mats):
    return reduce(np.kron, mats)


def dense_gate(gate, nq):
    """Matrix of a gate built from Kronecker products, qubit 0 leftmost (MSB).

    Written independently of the tensor kernels: controls become projector
    products, the target block is a 2x2 matrix.
    """
    kind = gate.kind
    if kind == "reverse":
        dim = 2**nq
        m = np.zeros((dim, dim), dtype=complex)
        qs = list(gate.qubits)
        for i in range(dim):
            bits = [(i >> (nq - 1 - q)) & 1 for q in range(nq)]
            new = list(bits)
            for a, q in enumerate(qs):
                new[q] = bits[qs[len(qs) - 1 - a]]
            j = int("".join(map(str, new)), 2)
            m[j, i] = 1
        return m
    ops = [I2] * nq
    for q, pol in gate.controls:
        ops[q] = P1 if pol else P0
    proj = kron_all(ops)
    if kind == "global":
        return np.eye(2**nq) + (np.exp(1j * gate.angle) - 1) * proj
    if kind == "phase":
        ops[gate.target] = P1
        return np.eye(2**nq) + (np.exp(1j * gate.angle) - 1) * kron_all(ops)
    u = {"x": X, "h": H}[kind]
    ops[gate.target] = u - I2
    return np.eye(2**nq) + kron_all(ops)


def dense_circuit(circ):
    m = np.eye(2**circ.num_qubits, dtype=complex)
    for g in circ.gates:
        m = dense_gate(g, circ.num_qubits) @ m
    return m


def random_state(rng, n):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_aliasing():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="analytic levels")
        yield


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split(".")[0].rstrip("abc")), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
