"""State vectors, gate operations and circuits.

Qubit 0 is the most significant bit of a basis index: for ``q`` qubits the
basis state ``|b_0 b_1 ... b_{q-1}>`` sits at index ``sum_i b_i 2**(q-1-i)``.
Gate kernels act on the trailing ``q`` axes of a ``(..., 2, 2, ..., 2)``
tensor, so a stack of states (any leading batch shape) is updated in one pass.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, UnreachableOutcomeError

PHASE = "phase"
PAULI_X = "x"
HADAMARD = "h"
GLOBAL = "global"
REVERSE = "reverse"
KINDS = (PHASE, PAULI_X, HADAMARD, GLOBAL, REVERSE)

_SQRT1_2 = 1.0 / math.sqrt(2.0)


def _normalize_controls(controls) -> tuple[tuple[int, int], ...]:
    """Accept ``3``, ``[1, (2, 0)]`` or ``{1: 1, 2: 0}``; bare ints mean polarity 1."""
    if controls is None:
        return ()
    if isinstance(controls, Mapping):
        items = controls.items()
    elif isinstance(controls, (int, np.integer)):
        items = [(controls, 1)]
    else:
        items = []
        for c in controls:
            if isinstance(c, (int, np.integer)):
                items.append((c, 1))
            else:
                q, pol = c
                items.append((q, pol))
    return tuple((int(q), int(p)) for q, p in items)


@dataclass(frozen=True)
class GateOp:
    """One gate of a circuit.

    ``kind`` is one of ``phase`` (R(angle) on ``target``: phase on ``|1>``),
    ``x``, ``h``, ``global`` (scalar ``e^{i angle}``; with controls it only
    acts on the subspace where they match, and ``target`` is an optional
    spectator) and ``reverse`` (bit-order reversal of ``qubits``). Controls are
    ``(qubit, polarity)`` pairs; polarity 0 conditions on ``|0>``.
    """

    kind: str
    target: int | None = None
    angle: float = 0.0
    controls: tuple[tuple[int, int], ...] = ()
    qubits: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        for _, pol in self.controls:
            if pol not in (0, 1):
                raise DomainError(f"control polarity must be 0 or 1, got {pol}")
        if self.kind == REVERSE:
            if not self.qubits or self.controls or self.target is not None:
                raise DomainError("reverse takes only a qubit list")
        elif self.kind != GLOBAL and self.target is None:
            raise DomainError(f"{self.kind} gate needs a target")
        support = self.support
        if len(set(support)) != len(support):
            raise DomainError(f"controls and target must be distinct: {support}")
        if any(q < 0 for q in support):
            raise DomainError(f"negative qubit index in {support}")

    @property
    def support(self) -> tuple[int, ...]:
        if self.kind == REVERSE:
            return tuple(self.qubits)
        qs = tuple(q for q, _ in self.controls)
        return qs if self.target is None else qs + (self.target,)

    @property
    def arity(self) -> int:
        return len(self.support)

    def inverse(self) -> GateOp:
        if self.kind in (PHASE, GLOBAL):
            return GateOp(self.kind, self.target, -self.angle, self.controls, self.qubits)
        return self


def phase_rotation(theta: float, target: int) -> GateOp:
    return GateOp(PHASE, target, float(theta))


def pauli_x(target: int, controls=()) -> GateOp:
    return GateOp(PAULI_X, target, 0.0, _normalize_controls(controls))


def hadamard(target: int) -> GateOp:
    return GateOp(HADAMARD, target)


def controlled_phase(theta: float, controls, target: int) -> GateOp:
    return GateOp(PHASE, target, float(theta), _normalize_controls(controls))


def global_phase(theta: float, controls=(), target: int | None = None) -> GateOp:
    return GateOp(GLOBAL, target, float(theta), _normalize_controls(controls))


def reverse_qubits(qubits: Sequence[int]) -> GateOp:
    return GateOp(REVERSE, qubits=tuple(int(q) for q in qubits))


@dataclass
class Circuit:
    num_qubits: int
    gates: list[GateOp] = field(default_factory=list)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise DomainError("a circuit needs at least one qubit")
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, gate: GateOp):
        bad = [q for q in gate.support if q >= self.num_qubits]
        if bad:
            raise DomainError(f"qubit index {bad[0]} out of range for {self.num_qubits} qubits")

    def append(self, gate: GateOp) -> Circuit:
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[GateOp]) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: Circuit) -> Circuit:
        if other.num_qubits != self.num_qubits:
            raise DomainError("cannot concatenate circuits of different width")
        return Circuit(self.num_qubits, self.gates + other.gates)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def inverse(self) -> Circuit:
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)])

    def remap(self, qubits: Sequence[int], num_qubits: int | None = None) -> Circuit:
        """Place this circuit onto register positions ``qubits[i]``."""
        qubits = list(qubits)
        if len(qubits) != self.num_qubits:
            raise DomainError("qubit map length must equal circuit width")
        m = {i: q for i, q in enumerate(qubits)}
        out = Circuit(num_qubits if num_qubits is not None else max(qubits) + 1)
        for g in self.gates:
            out.append(
                GateOp(
                    g.kind,
                    None if g.target is None else m[g.target],
                    g.angle,
                    tuple((m[q], p) for q, p in g.controls),
                    tuple(m[q] for q in g.qubits),
                )
            )
        return out

    @property
    def max_arity(self) -> int:
        return max((g.arity for g in self.gates), default=0)

    def arity_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(g.arity for g in self.gates).items()))

    def gate_counts(self) -> dict[tuple[str, int], int]:
        return dict(sorted(Counter((g.kind, g.arity) for g in self.gates).items()))

    def dump(self) -> str:
        return "".join(format_gate(g) + "\n" for g in self.gates)

    @classmethod
    def parse(cls, text: str, num_qubits: int) -> Circuit:
        return cls(num_qubits, [parse_gate(line) for line in text.splitlines() if line.strip()])


def format_gate(g: GateOp) -> str:
    """``KIND target [q:p,...] angle`` with the angle to 17 significant digits."""
    if g.kind == REVERSE:
        target = ",".join(str(q) for q in g.qubits)
    else:
        target = "-" if g.target is None else str(g.target)
    controls = ",".join(f"{q}:{p}" for q, p in g.controls)
    return f"{g.kind.upper()} {target} [{controls}] {g.angle:.17g}"


def parse_gate(line: str) -> GateOp:
    try:
        kind, target, controls, angle = line.split()
        kind = kind.lower()
        ctl = ()
        if controls.strip("[]"):
            ctl = tuple(tuple(int(v) for v in c.split(":")) for c in controls.strip("[]").split(","))
        if kind == REVERSE:
            return GateOp(REVERSE, qubits=tuple(int(q) for q in target.split(",")))
        return GateOp(kind, None if target == "-" else int(target), float(angle), ctl)
    except (ValueError, TypeError) as exc:
        raise DomainError(f"cannot parse gate line {line!r}: {exc}") from None


@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state of ``num_qubits`` qubits; the amplitude array is read-only."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = amps.size
        if n < 2 or n & (n - 1):
            raise DomainError(f"amplitude count must be a power of two >= 2, got {n}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Writable copy shaped ``(2,)*num_qubits``."""
        return self.amplitudes.reshape((2,) * self.num_qubits).copy()

    def __len__(self):
        return self.amplitudes.size


def basis_state(q: int, index: int) -> StateVector:
    if q < 1:
        raise DomainError("need at least one qubit")
    if not 0 <= index < 2**q:
        raise DomainError(f"basis index {index} out of range for {q} qubits")
    amps = np.zeros(2**q, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def _slot(ndim: int, nq: int, fixed: Mapping[int, int]) -> tuple:
    idx = [slice(None)] * ndim
    off = ndim - nq
    for q, v in fixed.items():
        idx[off + q] = v
    return tuple(idx)


def apply_gate_inplace(tensor: np.ndarray, gate: GateOp, nq: int) -> None:
    """Apply ``gate`` to the trailing ``nq`` qubit axes of ``tensor`` in place."""
    nd = tensor.ndim
    fixed = dict(gate.controls)
    if gate.kind == PHASE:
        fixed[gate.target] = 1
        tensor[_slot(nd, nq, fixed)] *= np.exp(1j * gate.angle)
    elif gate.kind == GLOBAL:
        tensor[_slot(nd, nq, fixed)] *= np.exp(1j * gate.angle)
    elif gate.kind in (PAULI_X, HADAMARD):
        i0 = _slot(nd, nq, {**fixed, gate.target: 0})
        i1 = _slot(nd, nq, {**fixed, gate.target: 1})
        a = tensor[i0].copy()
        if gate.kind == PAULI_X:
            tensor[i0] = tensor[i1]
            tensor[i1] = a
        else:
            b = tensor[i1].copy()
            tensor[i0] = (a + b) * _SQRT1_2
            tensor[i1] = (a - b) * _SQRT1_2
    elif gate.kind == REVERSE:
        off = nd - nq
        axes = list(range(nd))
        qs = gate.qubits
        for i, q in enumerate(qs):
            axes[off + q] = off + qs[len(qs) - 1 - i]
        tensor[...] = np.transpose(tensor, axes).copy()


def apply_circuit_inplace(tensor: np.ndarray, circuit: Circuit, nq: int) -> None:
    for g in circuit.gates:
        apply_gate_inplace(tensor, g, nq)


def _check_indices(gate: GateOp, q: int):
    bad = [i for i in gate.support if i >= q]
    if bad:
        raise DomainError(f"qubit index {bad[0]} invalid for a {q}-qubit state")


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    q = state.num_qubits
    _check_indices(gate, q)
    t = state.tensor()
    apply_gate_inplace(t, gate, q)
    return StateVector(t)


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.num_qubits != state.num_qubits:
        raise DomainError(
            f"circuit acts on {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )
    t = state.tensor()
    apply_circuit_inplace(t, circuit, state.num_qubits)
    return StateVector(t)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense matrix of ``circuit`` (column ``j`` is the image of ``|j>``)."""
    n = circuit.num_qubits
    dim = 2**n
    batch = np.eye(dim, dtype=np.complex128).reshape((dim,) + (2,) * n)
    apply_circuit_inplace(batch, circuit, n)
    return batch.reshape(dim, dim).T


def _check_subset(qubits: Sequence[int], q: int) -> list[int]:
    qubits = [int(i) for i in qubits]
    if not qubits:
        raise DomainError("qubit subset must be nonempty")
    if len(set(qubits)) != len(qubits) or any(not 0 <= i < q for i in qubits):
        raise DomainError(f"invalid qubit subset {qubits} for {q} qubits")
    return qubits


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Outcome probabilities of ``qubits``; index bits follow the given order, first = MSB."""
    q = state.num_qubits
    qubits = _check_subset(qubits, q)
    probs = np.abs(state.amplitudes.reshape((2,) * q)) ** 2
    rest = tuple(i for i in range(q) if i not in qubits)
    marg = probs.sum(axis=rest) if rest else probs
    # remaining axes are in ascending qubit order; reorder to the requested order
    order = sorted(qubits)
    marg = np.transpose(marg, [order.index(i) for i in qubits])
    return marg.reshape(-1)


def _bits(value: int, width: int) -> str:
    return format(value, f"0{width}b")


def register_distribution(state: StateVector, qubits: Sequence[int]) -> dict[str, float]:
    p = marginal_probabilities(state, qubits)
    width = len(list(qubits))
    return {_bits(i, width): float(v) for i, v in enumerate(p)}


def condition_on_outcome(
    state: StateVector, qubits: Sequence[int], outcome, min_probability: float = 1e-14
) -> tuple[StateVector, float]:
    """Project ``qubits`` onto ``outcome`` and renormalize the complement register.

    ``outcome`` is a bit string (first char = first listed qubit) or an integer.
    """
    q = state.num_qubits
    qubits = _check_subset(qubits, q)
    if len(qubits) == q:
        raise DomainError("conditioning on every qubit leaves no register")
    if isinstance(outcome, str):
        if len(outcome) != len(qubits) or set(outcome) - {"0", "1"}:
            raise DomainError(f"bad outcome {outcome!r} for {len(qubits)} qubits")
        values = [int(b) for b in outcome]
    else:
        if not 0 <= int(outcome) < 2 ** len(qubits):
            raise DomainError(f"outcome {outcome} out of range")
        values = [int(b) for b in _bits(int(outcome), len(qubits))]
    t = state.amplitudes.reshape((2,) * q)
    sub = t[_slot(q, q, dict(zip(qubits, values)))].reshape(-1)
    prob = float(np.vdot(sub, sub).real)
    if prob <= min_probability:
        raise UnreachableOutcomeError(f"outcome {outcome} has probability {prob:.3g}")
    return StateVector(sub / math.sqrt(prob)), prob


def sample_outcomes(
    state: StateVector, qubits: Sequence[int], shots: int, seed=None
) -> dict[str, int]:
    """Seeded shot sampler over ``qubits``; exact distributions remain the primary path."""
    p = marginal_probabilities(state, qubits)
    rng = np.random.default_rng(seed)
    draws = rng.choice(p.size, size=shots, p=p / p.sum())
    width = len(list(qubits))
    counts = Counter(int(d) for d in draws)
    return {_bits(k, width): counts[k] for k in sorted(counts)}
