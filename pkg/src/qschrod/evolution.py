"""Trotterized time evolution built from diagonal phase circuits.

One step is ``e^{-iV dt/2} QFT e^{-iK dt} QFT^dagger e^{-iV dt/2}`` acting on the
encoded simulation register (see :mod:`qschrod.mesh`). Every factor except the
QFTs is diagonal in the computational basis of its frame, so each is a list
of phase gates whose angles follow from the binary digits of the basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UnsupportedConfigurationError
from .mesh import SYMMETRIC, MeshConvention, mesh_points, qft_circuit
from .register import (
    Circuit,
    StateVector,
    apply_circuit_inplace,
    controlled_phase,
    global_phase,
    pauli_x,
    phase_rotation,
)


def _qubit_list(qubits, s: int | None = None) -> list[int]:
    if qubits is None:
        if s is None:
            raise DomainError("need either qubits or s")
        return list(range(s))
    qubits = [int(q) for q in qubits]
    if s is not None and len(qubits) != s:
        raise DomainError(f"expected {s} qubits, got {len(qubits)}")
    return qubits


def _empty(qubits: Sequence[int], num_qubits: int | None) -> Circuit:
    return Circuit(num_qubits if num_qubits is not None else max(qubits) + 1)


@dataclass(frozen=True)
class TrotterConfig:
    dt: float
    convention: MeshConvention = MeshConvention()

    def __post_init__(self):
        if not self.dt >= 0:
            raise DomainError(f"time step must be non-negative, got {self.dt}")

    @property
    def s(self) -> int:
        return self.convention.s


class PotentialSpec:
    """Base for the potentials; subclasses give ``values`` and ``half_step_circuit``."""

    def values(self, conv: MeshConvention) -> np.ndarray:
        raise NotImplementedError

    def half_step_circuit(self, dt: float, conv: MeshConvention, qubits=None, num_qubits=None):
        """Circuit for ``e^{-i V dt/2}`` on the position register."""
        raise NotImplementedError

    def check(self, conv: MeshConvention) -> None:
        pass

    def step_circuit(self, dt: float, conv: MeshConvention) -> Circuit:
        return trotter_step_circuit(self, TrotterConfig(dt, conv))


@dataclass(frozen=True)
class Harmonic(PotentialSpec):
    omega: float = 100.0

    def __post_init__(self):
        if not self.omega > 0:
            raise DomainError("harmonic frequency must be positive")

    def values(self, conv):
        return 0.5 * self.omega**2 * mesh_points(conv) ** 2

    def half_step_circuit(self, dt, conv, qubits=None, num_qubits=None):
        return harmonic_circuit(self.omega, TrotterConfig(dt, conv), qubits, num_qubits)


@dataclass(frozen=True)
class SquareWell(PotentialSpec):
    v0: float = 100.0
    a: float = 0.25

    def __post_init__(self):
        if not self.v0 > 0:
            raise DomainError("well depth must be positive")
        if self.a != 0.25:
            raise UnsupportedConfigurationError("only the half-width a = 1/4 is supported")

    def values(self, conv):
        x = mesh_points(conv)
        # half-open so the asymmetric mesh matches the two-leading-bit quadrant rule
        return np.where((x >= -self.a) & (x < self.a), -self.v0, 0.0)

    def half_step_circuit(self, dt, conv, qubits=None, num_qubits=None):
        return square_well_circuit(self.v0, dt, _qubit_list(qubits, conv.s), num_qubits)


@dataclass(frozen=True)
class Coulomb(PotentialSpec):
    kappa: float = 10.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("Coulomb strength must be positive")

    def check(self, conv):
        _check_coulomb(conv.s, conv)

    def values(self, conv, exact: bool = False):
        """``-kappa/|x_k|``, with the truncated reciprocal unless ``exact``."""
        self.check(conv)
        x = mesh_points(conv)
        if exact:
            return -self.kappa / np.abs(x)
        return -self.kappa * coulomb_surrogate(conv)

    def half_step_circuit(self, dt, conv, qubits=None, num_qubits=None):
        return coulomb_circuit(self.kappa, dt, qubits, s=conv.s, convention=conv, num_qubits=num_qubits)


def quadratic_phase_circuit(
    s: int, strength: float, offset: float, qubits=None, num_qubits: int | None = None
) -> Circuit:
    """Diagonal circuit ``|j> -> e^{i strength (j/2^s - offset)^2} |j>``.

    With ``u = sum_n j_n 2^-n`` the exponent is ``u^2 - 2 offset u + offset^2``;
    ``j_n^2 = j_n`` folds the square terms into the single-qubit rotations and
    the cross terms become one controlled phase per qubit pair.
    """
    qs = _qubit_list(qubits, s)
    g, c = float(strength), float(offset)
    circ = _empty(qs, num_qubits)
    circ.append(global_phase(g * c * c))
    for n, q in enumerate(qs, start=1):
        circ.append(phase_rotation(g * (2.0 ** (-2 * n) - 2 * c * 2.0**-n), q))
    for (m, qm), (n, qn) in combinations(enumerate(qs, start=1), 2):
        circ.append(controlled_phase(2 * g * 2.0 ** (-m - n), [qm], qn))
    return circ


def kinetic_strength(cfg: TrotterConfig) -> float:
    return -((2 * math.pi * cfg.convention.N) ** 2) * cfg.dt / 2


def kinetic_circuit(cfg: TrotterConfig, qubits=None, num_qubits=None) -> Circuit:
    """``e^{-i p_j^2 dt / 2}`` in the momentum frame."""
    return quadratic_phase_circuit(
        cfg.s, kinetic_strength(cfg), cfg.convention.offset, qubits, num_qubits
    )


def harmonic_circuit(omega: float, cfg: TrotterConfig, qubits=None, num_qubits=None) -> Circuit:
    """Half step ``e^{-i (omega^2/2) x_k^2 dt/2}`` of the oscillator potential."""
    beta = -(omega**2) * cfg.dt / 4
    return quadratic_phase_circuit(cfg.s, beta, cfg.convention.offset, qubits, num_qubits)


def square_well_circuit(
    v0: float, dt: float, qubits=None, num_qubits=None, decomposed: bool = False
) -> Circuit:
    """Half step of the a = 1/4 well: ``diag(1, e^{i v0 dt/2}, e^{i v0 dt/2}, 1)`` on j1 j2.

    The well occupies the two middle quadrants, i.e. exactly the basis states
    whose two leading bits differ. ``decomposed`` emits the X / CNOT /
    controlled-scalar network instead of two mixed-polarity controlled phases.
    """
    qs = _qubit_list(qubits, None if qubits is not None else 2)
    if len(qs) < 2:
        raise DomainError("the square-well circuit needs at least two simulation qubits")
    theta = v0 * dt / 2
    j1, j2 = qs[0], qs[1]
    circ = _empty(qs, num_qubits)
    if not decomposed:
        circ.append(controlled_phase(theta, [(j1, 0)], j2))
        circ.append(controlled_phase(theta, [(j2, 0)], j1))
        return circ
    # j2 <- j2 xor not(j1), then not: j2 == 1 exactly when j1 != j2
    flip = [pauli_x(j1), pauli_x(j2, [j1]), pauli_x(j1), pauli_x(j2)]
    circ.extend(flip)
    circ.append(global_phase(theta, [j2], target=j1))
    circ.extend(reversed(flip))
    return circ


def reciprocal_coefficients(bits: Sequence[int]) -> np.ndarray:
    """Coefficients ``a_1..a_6`` with ``1/x ~ 1 + sum_l a_l 2^-l`` for ``x = 0.j1 j2 ... j7``.

    They solve ``j_m + sum_{k+l=m} j_k a_l = 1`` order by order; bits beyond
    the ones given are zero.
    """
    b = [int(v) for v in bits][:7]
    if any(v not in (0, 1) for v in b):
        raise DomainError("bits must be 0 or 1")
    if not b or b[0] != 1:
        raise DomainError("leading bit must be 1; shift the fraction first")
    j1, j2, j3, j4, j5, j6, j7 = b + [0] * (7 - len(b))
    return np.array(
        [
            1 - j2,
            1 - j3,
            1 - j2 - j3 - j4 + 2 * j2 * j3,
            1 - j4 - j5 - j2 * j3 + 2 * j2 * j4,
            1 - j2 - j4 - j5 - j6 - j2 * j4 + 2 * j2 * j5 + 2 * j3 * j4,
            1 - j3 - j5 - j6 - j7 + j2 * j3 + 3 * j2 * j4 - j2 * j5
            + 2 * j2 * j6 + 2 * j3 * j4 + 2 * j3 * j5 - 6 * j2 * j3 * j4,
        ],
        dtype=int,
    )


def truncated_reciprocal(bits: Sequence[int], depth: int = 6) -> float:
    """Truncated expansion of ``1/x`` for ``x = 0.b1 b2 ...`` (binary), any leading zeros."""
    b = [int(v) for v in bits]
    if 1 not in b:
        raise DomainError("x must be positive")
    shift = b.index(1)
    a = reciprocal_coefficients(b[shift:])[:depth]
    y = 1.0 + float(np.sum(a * 2.0 ** -np.arange(1, len(a) + 1)))
    return 2.0**shift * y


def _fraction_bits(value: float, width: int) -> list[int]:
    scaled = value * 2**width
    m = int(round(scaled))
    if abs(scaled - m) > 1e-9 or not 0 < m < 2**width:
        raise DomainError(f"{value} is not a {width}-bit binary fraction in (0, 1)")
    return [int(c) for c in format(m, f"0{width}b")]


def coulomb_surrogate(conv: MeshConvention) -> np.ndarray:
    """Truncated reciprocal of ``|x_k|`` on the symmetric mesh (all points are odd/2N)."""
    if conv.variant != SYMMETRIC:
        raise DomainError("the Coulomb potential needs the symmetric mesh")
    return np.array(
        [truncated_reciprocal(_fraction_bits(abs(x), conv.s + 1)) for x in mesh_points(conv)]
    )


# Branch exponents for |x| = 0.0 j2 j3 j4 1 (binary), transcribed term by term.
def _branch_v2(j3, j4):
    return 2 * (
        1 + (1 - j3) * 2**-1 + (1 - j4) * 2**-2 + (-j3 - j4 + 2 * j3 * j4) * 2**-3
        + (2 * j3 - j3 * j4) * 2**-4 + (-2 * j3 + 2 * j4) * 2**-5
        + (1 + 3 * j3 + j4 - 5 * j3 * j4) * 2**-6
    )


def _branch_v3(j4):
    return 2**2 * (
        1 + (1 - j4) * 2**-1 + j4 * 2**-3 + (1 - j4) * 2**-4 + (1 - j4) * 2**-5 + j4 * 2**-6
    )


_BRANCH_V4 = 2**3 * (1 + 2**-2 + 2**-4 + 2**-6)
_BRANCH_U4 = 2**4 * (1 + 2**-1 + 2**-2 + 2**-3 + 2**-4 + 2**-5 + 2**-6)


def multilinear_coefficients(func: Callable[..., float], nvars: int) -> dict[tuple[int, ...], float]:
    """Coefficients of the unique multilinear polynomial agreeing with ``func`` on {0,1}^n."""
    coeffs = {}
    for size in range(nvars + 1):
        for mono in combinations(range(nvars), size):
            total = 0.0
            for sub_size in range(size + 1):
                for sub in combinations(mono, sub_size):
                    args = [1 if i in sub else 0 for i in range(nvars)]
                    total += (-1) ** (size - sub_size) * func(*args)
            if abs(total) > 1e-15:
                coeffs[mono] = total
    return coeffs


def coulomb_branches(j2: int, j3: int, j4: int):
    """``(condition, free qubits, exponent function)`` for each recursion branch."""
    return [
        ({j2: 1}, [j3, j4], _branch_v2),
        ({j2: 0, j3: 1}, [j4], _branch_v3),
        ({j2: 0, j3: 0, j4: 1}, [], lambda: _BRANCH_V4),
        ({j2: 0, j3: 0, j4: 0}, [], lambda: _BRANCH_U4),
    ]


def _check_coulomb(s: int, conv: MeshConvention | None):
    if s != 4:
        raise UnsupportedConfigurationError("the Coulomb circuit is built for s = 4 only")
    if conv is not None and conv.variant != SYMMETRIC:
        raise DomainError("the Coulomb potential needs the symmetric mesh (x = 0 is singular)")


def coulomb_circuit(
    kappa: float,
    dt: float,
    qubits=None,
    s: int = 4,
    convention: MeshConvention | None = None,
    num_qubits: int | None = None,
) -> Circuit:
    """Half step ``e^{i kappa dt / (2|x_k|)}`` with the truncated reciprocal, s = 4.

    Negative mesh points are mirrored onto positive ones by flipping j2..j4
    when j1 = 0, so one phase network serves both signs. The branch phases
    contain products of up to three bits and are emitted as multi-controlled
    phases; :func:`qschrod.lowering.lower_circuit` brings them to arity 2.
    """
    _check_coulomb(s, convention)
    qs = _qubit_list(qubits, s)
    j1, j2, j3, j4 = qs
    theta = kappa * dt / 2
    circ = _empty(qs, num_qubits)
    flips = [pauli_x(q, [(j1, 0)]) for q in (j2, j3, j4)]
    circ.extend(flips)
    for cond, free, func in coulomb_branches(j2, j3, j4):
        for mono, coef in multilinear_coefficients(func, len(free)).items():
            ones = [q for q, p in cond.items() if p == 1] + [free[i] for i in mono]
            zeros = [(q, 0) for q, p in cond.items() if p == 0]
            angle = theta * coef
            if ones:
                circ.append(controlled_phase(angle, zeros + ones[:-1], ones[-1]))
            else:
                circ.append(global_phase(angle, zeros))
    circ.extend(flips)
    return circ


def potential_circuit(pot: PotentialSpec, dt: float, conv: MeshConvention, qubits=None, num_qubits=None):
    pot.check(conv)
    return pot.half_step_circuit(dt, conv, qubits, num_qubits)


def trotter_step_circuit(pot: PotentialSpec, cfg: TrotterConfig) -> Circuit:
    """Half potential, inverse QFT, kinetic phase, QFT, half potential."""
    s, conv = cfg.s, cfg.convention
    half = potential_circuit(pot, cfg.dt, conv)
    return (
        half
        + qft_circuit(s, inverse=True)
        + kinetic_circuit(cfg)
        + qft_circuit(s)
        + half
    )


def evolve_tensor(
    tensor: np.ndarray,
    pot: PotentialSpec,
    cfg: TrotterConfig,
    n_steps: int,
    merge_half_steps: bool = False,
) -> None:
    """Run ``n_steps`` Trotter steps in place on the trailing s axes of ``tensor``."""
    if n_steps < 1:
        raise DomainError("n_steps must be at least 1")
    s = cfg.s
    if not merge_half_steps:
        step = pot.step_circuit(cfg.dt, cfg.convention)
        for _ in range(n_steps):
            apply_circuit_inplace(tensor, step, s)
        return
    conv = cfg.convention
    half = potential_circuit(pot, cfg.dt, conv)
    full = potential_circuit(pot, 2 * cfg.dt, conv)
    middle = qft_circuit(s, inverse=True) + kinetic_circuit(cfg) + qft_circuit(s)
    apply_circuit_inplace(tensor, half, s)
    for i in range(n_steps):
        apply_circuit_inplace(tensor, middle, s)
        apply_circuit_inplace(tensor, full if i < n_steps - 1 else half, s)


def evolve(
    state: StateVector,
    pot: PotentialSpec,
    cfg: TrotterConfig,
    n_steps: int,
    merge_half_steps: bool = False,
) -> StateVector:
    if state.num_qubits != cfg.s:
        raise DomainError(f"state has {state.num_qubits} qubits, mesh needs {cfg.s}")
    t = state.tensor()
    evolve_tensor(t, pot, cfg, n_steps, merge_half_steps)
    return StateVector(t)
