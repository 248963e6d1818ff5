"""Ground truth for the circuits: dense discretized Hamiltonians, analytic
levels and eigenfunctions, and the named initial states.

The dense kinetic operator is assembled from the plane waves on the mesh,
``W[k, j] = e^{2 pi i (p_j / 2pi) x_k} / sqrt(N)``, i.e. the same discrete
model the circuits use but without going through any circuit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.special import eval_genlaguerre, eval_hermite

from .errors import DomainError
from .evolution import Coulomb, Harmonic, PotentialSpec, SquareWell
from .mesh import (
    MeshConvention,
    SampledWavefunction,
    mesh_points,
    momentum_points,
    position_phases,
)
from .register import StateVector


@dataclass(frozen=True, eq=False)
class DenseHamiltonian:
    """Hamiltonian on raw mesh samples; ``encoded_matrix`` acts on register amplitudes."""

    matrix: np.ndarray
    convention: MeshConvention
    pot: PotentialSpec | None = None

    @cached_property
    def encoded_matrix(self) -> np.ndarray:
        d = position_phases(self.convention)
        return d[:, None] * self.matrix * d.conj()[None, :]

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.spectrum[1]

    def propagator(self, t: float, encoded: bool = False) -> np.ndarray:
        e, v = self.spectrum
        u = (v * np.exp(-1j * e * t)) @ v.conj().T
        if encoded:
            d = position_phases(self.convention)
            u = d[:, None] * u * d.conj()[None, :]
        return u


def kinetic_matrix(conv: MeshConvention) -> np.ndarray:
    x = mesh_points(conv)
    p = momentum_points(conv)
    w = np.exp(1j * np.outer(x, p)) / math.sqrt(conv.N)
    return (w * (p**2 / 2)) @ w.conj().T


def dense_hamiltonian(
    pot: PotentialSpec, conv: MeshConvention, exact_coulomb: bool = False
) -> DenseHamiltonian:
    """Kinetic plus diagonal potential on the mesh.

    The Coulomb potential uses the same truncated reciprocal as its circuit
    unless ``exact_coulomb`` asks for ``1/|x_k|``.
    """
    if conv.s > 6:
        raise DomainError("dense oracle is limited to s <= 6")
    if isinstance(pot, Coulomb):
        v = pot.values(conv, exact=exact_coulomb)
    elif pot is None:
        v = np.zeros(conv.N)
    else:
        v = pot.values(conv)
    h = kinetic_matrix(conv) + np.diag(v)
    h = 0.5 * (h + h.conj().T)
    return DenseHamiltonian(h, conv, pot)


def exact_evolution(h: DenseHamiltonian, state, t: float):
    """``e^{-iHt}`` applied to raw samples, a ``SampledWavefunction`` or an encoded ``StateVector``."""
    if isinstance(state, StateVector):
        return StateVector(h.propagator(t, encoded=True) @ state.amplitudes)
    if isinstance(state, SampledWavefunction):
        return SampledWavefunction(state.convention, h.propagator(t) @ state.values)
    return h.propagator(t) @ np.asarray(state, dtype=complex)


def square_well_matching(energy: float, v0: float, a: float, parity: str) -> float:
    """Pole-free matching condition; zero at a bound state of the given parity."""
    k = math.sqrt(2 * (energy + v0))
    q = math.sqrt(-2 * energy)
    if parity == "even":
        return k * math.sin(k * a) - q * math.cos(k * a)
    return k * math.cos(k * a) + q * math.sin(k * a)


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12) -> float:
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def square_well_levels(v0: float = 100.0, a: float = 0.25) -> list[tuple[float, str]]:
    """Bound states ``(energy, parity)`` of the finite well, lowest first.

    Brackets sign changes on an energy grid of spacing v0/1000, then bisects.
    """
    grid = np.linspace(-v0, 0.0, 1001)[1:-1]
    found = []
    for parity in ("even", "odd"):
        f = lambda e, p=parity: square_well_matching(e, v0, a, p)
        vals = [f(e) for e in grid]
        for e0, e1, f0, f1 in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
            if f0 == 0:
                found.append((float(e0), parity))
            elif (f0 < 0) != (f1 < 0):
                found.append((_bisect(f, e0, e1), parity))
    return sorted(found)


def analytic_levels(pot: PotentialSpec, count: int = 3) -> list[float]:
    if isinstance(pot, Harmonic):
        return [pot.omega * (n + 0.5) for n in range(count)]
    if isinstance(pot, SquareWell):
        return [e for e, _ in square_well_levels(pot.v0, pot.a)][:count]
    if isinstance(pot, Coulomb):
        return [-pot.kappa**2 / (2 * n * n) for n in range(1, count + 1)]
    raise DomainError(f"no analytic levels for {pot!r}")


def analytic_eigenfunction(pot: PotentialSpec, level: int, x: np.ndarray) -> np.ndarray:
    """Unnormalized continuum eigenfunction ``level`` (Coulomb: odd sector) at ``x``."""
    x = np.asarray(x, dtype=float)
    if isinstance(pot, Harmonic):
        xi = math.sqrt(pot.omega) * x
        return eval_hermite(level, xi) * np.exp(-xi * xi / 2)
    if isinstance(pot, SquareWell):
        levels = square_well_levels(pot.v0, pot.a)
        if level >= len(levels):
            raise DomainError(f"the well has only {len(levels)} bound states")
        e, parity = levels[level]
        k, q, a = math.sqrt(2 * (e + pot.v0)), math.sqrt(-2 * e), pot.a
        ax = np.abs(x)
        decay = np.exp(-q * (ax - a))
        if parity == "even":
            return np.where(ax < a, np.cos(k * x), math.cos(k * a) * decay)
        return np.where(ax < a, np.sin(k * x), np.sign(x) * math.sin(k * a) * decay)
    if isinstance(pot, Coulomb):
        n = level + 1
        r = np.abs(x)
        return x * np.exp(-pot.kappa * r / n) * eval_genlaguerre(n - 1, 1, 2 * pot.kappa * r / n)
    raise DomainError(f"no analytic eigenfunction for {pot!r}")


INITIAL_STATES: dict[str, tuple[Callable[[np.ndarray, float], np.ndarray], str]] = {
    "gaussian": (lambda x, w: np.exp(-w * x**2 / 2), "exp(-omega x^2/2)"),
    "x_gaussian": (lambda x, w: x * np.exp(-w * x**2 / 2), "x exp(-omega x^2/2)"),
    "x2_gaussian": (lambda x, w: x**2 * np.exp(-w * x**2 / 2), "x^2 exp(-omega x^2/2)"),
    "sech2": (lambda x, w: 1 / np.cosh(20 * x) ** 2, "1/cosh^2(20x)"),
    "gaussian10": (lambda x, w: np.exp(-10 * x**2), "exp(-10 x^2)"),
    "x_gaussian10": (lambda x, w: x * np.exp(-10 * x**2), "x exp(-10 x^2)"),
    "x_exp10": (lambda x, w: x * np.exp(-10 * np.abs(x)), "x exp(-10|x|)"),
    "x_absx_exp10": (lambda x, w: x * np.abs(x) * np.exp(-10 * np.abs(x)), "x|x| exp(-10|x|)"),
}


def initial_state_library(name: str, conv: MeshConvention, omega: float = 100.0) -> SampledWavefunction:
    try:
        func, _ = INITIAL_STATES[name]
    except KeyError:
        raise DomainError(
            f"unknown initial state {name!r}; valid names: {', '.join(INITIAL_STATES)}"
        ) from None
    return SampledWavefunction.from_function(lambda x: func(x, omega), conv)
