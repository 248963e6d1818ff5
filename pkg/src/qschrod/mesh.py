"""Coordinate and momentum meshes on [-1/2, 1/2] and the QFT that links them.

A basis state ``|k>`` of the simulation register stands for mesh point
``x_k = k/N - c`` and, after the inverse QFT, ``|j>`` stands for momentum
``p_j = 2*pi*(j - c*N)``. The offset ``c`` is 1/2 on the asymmetric mesh
(which contains x = 0) and 1/2 - 1/(2N) on the symmetric one (which is
mirror symmetric and skips x = 0). Samples are multiplied by
``exp(2*pi*i*c*k)`` when loaded so that the textbook QFT performs the change
of basis; decoding strips that phase again.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .register import (
    Circuit,
    StateVector,
    apply_circuit,
    controlled_phase,
    hadamard,
    reverse_qubits,
)
from .lowering import swap_gates

ASYMMETRIC = "asymmetric"
SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class MeshConvention:
    variant: str = SYMMETRIC
    N: int = 16

    def __post_init__(self):
        if self.variant not in (ASYMMETRIC, SYMMETRIC):
            raise DomainError(f"mesh variant must be {ASYMMETRIC!r} or {SYMMETRIC!r}")
        if self.N < 2 or self.N & (self.N - 1):
            raise DomainError(f"number of mesh points must be a power of two, got {self.N}")

    @classmethod
    def asymmetric(cls, N: int = 16) -> MeshConvention:
        return cls(ASYMMETRIC, N)

    @classmethod
    def symmetric(cls, N: int = 16) -> MeshConvention:
        return cls(SYMMETRIC, N)

    @classmethod
    def from_qubits(cls, variant: str, s: int) -> MeshConvention:
        return cls(variant, 2**s)

    @property
    def s(self) -> int:
        return self.N.bit_length() - 1

    @property
    def offset(self) -> float:
        if self.variant == ASYMMETRIC:
            return 0.5
        return 0.5 - 0.5 / self.N


def mesh_points(conv: MeshConvention) -> np.ndarray:
    return np.arange(conv.N) / conv.N - conv.offset


def momentum_points(conv: MeshConvention) -> np.ndarray:
    return 2 * np.pi * (np.arange(conv.N) - conv.offset * conv.N)


def position_phases(conv: MeshConvention) -> np.ndarray:
    """Factors turning samples psi(x_k) into register amplitudes."""
    return np.exp(2j * np.pi * conv.offset * np.arange(conv.N))


def momentum_phases(conv: MeshConvention) -> np.ndarray:
    """Factors turning inverse-QFT amplitudes into psi(p_j), constant phase included."""
    c, N = conv.offset, conv.N
    return np.exp(2j * np.pi * c * np.arange(N)) * np.exp(-2j * np.pi * c * c * N)


@dataclass(frozen=True, eq=False)
class SampledWavefunction:
    convention: MeshConvention
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != self.convention.N:
            raise DomainError(f"expected {self.convention.N} samples, got {vals.size}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(
        cls, func: Callable[[np.ndarray], np.ndarray], conv: MeshConvention, normalize: bool = True
    ) -> SampledWavefunction:
        w = cls(conv, func(mesh_points(conv)))
        return w.normalized() if normalize else w

    @property
    def x(self) -> np.ndarray:
        return mesh_points(self.convention)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def normalized(self) -> SampledWavefunction:
        n = self.norm()
        if n == 0:
            raise DomainError("cannot normalize a zero wavefunction")
        return SampledWavefunction(self.convention, self.values / n)


def encode_wavefunction(samples: SampledWavefunction) -> StateVector:
    if not samples.is_normalized():
        raise DomainError(
            f"wavefunction norm^2 is {samples.norm() ** 2:.12g}; normalize it before encoding"
        )
    return StateVector(position_phases(samples.convention) * samples.values)


def _check_size(state: StateVector, conv: MeshConvention):
    if len(state) != conv.N:
        raise DomainError(f"state has {len(state)} amplitudes, mesh has {conv.N} points")


def decode_wavefunction(state: StateVector, conv: MeshConvention) -> SampledWavefunction:
    _check_size(state, conv)
    return SampledWavefunction(conv, np.conj(position_phases(conv)) * state.amplitudes)


def qft_circuit(
    qubits: int | Sequence[int],
    inverse: bool = False,
    num_qubits: int | None = None,
    emit_swaps: bool = False,
) -> Circuit:
    """Textbook QFT ``|j> -> N^{-1/2} sum_k e^{2 pi i j k / N} |k>`` on ``qubits``.

    ``qubits[0]`` is the most significant bit of ``j``. The closing bit
    reversal is a single ``reverse`` gate unless ``emit_swaps`` is set.
    """
    qs = list(range(qubits)) if isinstance(qubits, (int, np.integer)) else [int(q) for q in qubits]
    if not qs:
        raise DomainError("QFT needs at least one qubit")
    n = len(qs)
    circ = Circuit(num_qubits if num_qubits is not None else max(qs) + 1)
    for i in range(n):
        circ.append(hadamard(qs[i]))
        for m in range(i + 1, n):
            circ.append(controlled_phase(2 * math.pi / 2 ** (m - i + 1), [qs[m]], qs[i]))
    if n > 1:
        if emit_swaps:
            for i in range(n // 2):
                circ.extend(swap_gates(qs[i], qs[n - 1 - i]))
        else:
            circ.append(reverse_qubits(qs))
    return circ.inverse() if inverse else circ


def x_to_p(state: StateVector, conv: MeshConvention | None = None) -> StateVector:
    if conv is not None:
        _check_size(state, conv)
    return apply_circuit(state, qft_circuit(state.num_qubits, inverse=True))


def p_to_x(state: StateVector, conv: MeshConvention | None = None) -> StateVector:
    if conv is not None:
        _check_size(state, conv)
    return apply_circuit(state, qft_circuit(state.num_qubits))


def decode_momentum(state: StateVector, conv: MeshConvention) -> np.ndarray:
    """psi(p_j) from a register already moved to the momentum frame by ``x_to_p``."""
    _check_size(state, conv)
    return momentum_phases(conv) * state.amplitudes
