"""Rewrite circuits into one- and two-qubit gates for gate-count reports.

Simulation always runs the native circuits; the lowered form is unitarily
identical and exists so arity claims can be checked rather than asserted.
"""
from __future__ import annotations

import math
from itertools import combinations

from .errors import UnsupportedConfigurationError
from .register import (
    GLOBAL,
    HADAMARD,
    PAULI_X,
    PHASE,
    REVERSE,
    Circuit,
    GateOp,
    controlled_phase,
    global_phase,
    hadamard,
    pauli_x,
    phase_rotation,
)


def swap_gates(a: int, b: int) -> list[GateOp]:
    return [pauli_x(b, [a]), pauli_x(a, [b]), pauli_x(b, [a])]


def parity_phase_gates(theta: float, qubits) -> list[GateOp]:
    """``e^{i theta b_1 b_2 ... b_k}`` from CNOT ladders and single-qubit rotations.

    Uses ``prod b_i = 2^{1-k} sum_{T != {}} (-1)^{|T|-1} parity(T)``.
    """
    qubits = list(qubits)
    k = len(qubits)
    if k == 1:
        return [phase_rotation(theta, qubits[0])]
    out: list[GateOp] = []
    scale = theta / 2 ** (k - 1)
    for size in range(1, k + 1):
        sign = 1.0 if size % 2 else -1.0
        for subset in combinations(qubits, size):
            *rest, last = subset
            ladder = [pauli_x(last, [q]) for q in rest]
            out.extend(ladder)
            out.append(phase_rotation(sign * scale, last))
            out.extend(reversed(ladder))
    return out


def _lower_positive(g: GateOp) -> list[GateOp]:
    """Lower a gate whose controls all have polarity 1."""
    ctl = [q for q, _ in g.controls]
    if g.kind == GLOBAL:
        if not ctl:
            return [global_phase(g.angle)]
        return _lower_positive(controlled_phase(g.angle, ctl[:-1], ctl[-1]))
    if g.kind == PHASE:
        if len(ctl) <= 1:
            return [g]
        return parity_phase_gates(g.angle, ctl + [g.target])
    if g.kind == PAULI_X:
        if len(ctl) <= 1:
            return [g]
        return (
            [hadamard(g.target)]
            + parity_phase_gates(math.pi, ctl + [g.target])
            + [hadamard(g.target)]
        )
    if g.kind == HADAMARD and not ctl:
        return [g]
    raise UnsupportedConfigurationError(f"cannot lower {g}")


def lower_gate(g: GateOp) -> list[GateOp]:
    if g.kind == REVERSE:
        qs = g.qubits
        out = []
        for i in range(len(qs) // 2):
            out.extend(swap_gates(qs[i], qs[len(qs) - 1 - i]))
        return out
    flips = [pauli_x(q) for q, p in g.controls if p == 0]
    positive = GateOp(g.kind, g.target, g.angle, tuple((q, 1) for q, _ in g.controls), g.qubits)
    return flips + _lower_positive(positive) + flips


def lower_circuit(circuit: Circuit) -> Circuit:
    out = Circuit(circuit.num_qubits)
    for g in circuit.gates:
        out.extend(lower_gate(g))
    return out
