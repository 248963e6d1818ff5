"""Phase estimation of the Trotterized propagator on a work + simulation register.

Register layout: work qubits ``0..w-1`` then simulation qubits ``w..w+s-1``,
all most-significant first. The work qubit controlling ``U^{2^k}`` sits at
position ``w-1-k`` so that, after the inverse QFT, outcome ``m`` reads as the
phase ``m / 2^w`` and the energy ``E_m = E_ref - 2 pi m / (2^w t)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .mesh import MeshConvention, SampledWavefunction, decode_wavefunction, encode_wavefunction, qft_circuit
from .register import (
    Circuit,
    StateVector,
    apply_circuit_inplace,
    condition_on_outcome,
    global_phase,
    hadamard,
    marginal_probabilities,
)

REPEAT = "repeat"
RESCALE = "rescale"


@dataclass(frozen=True)
class PhaseEstimationConfig:
    """Run parameters.

    ``power_mode`` picks how ``U^{2^k}`` is built: ``repeat`` applies
    ``2^k n`` steps of ``t/n``; ``rescale`` applies ``n`` steps of ``2^k t/n``
    (fewer gates, larger Trotter error on the high powers).
    """

    w: int = 4
    s: int = 4
    t: float = 0.045
    n: int = 30
    e_ref: float = 0.0
    convention: MeshConvention | str = "symmetric"
    power_mode: str = REPEAT
    keep_threshold: float = 1e-6

    def __post_init__(self):
        if self.w < 1 or self.s < 1:
            raise DomainError("need at least one work and one simulation qubit")
        if not self.t > 0:
            raise DomainError("evolution time t must be positive")
        if self.n < 1:
            raise DomainError("Trotter step count n must be at least 1")
        if self.power_mode not in (REPEAT, RESCALE):
            raise DomainError(f"power_mode must be {REPEAT!r} or {RESCALE!r}")
        conv = self.convention
        if isinstance(conv, str):
            conv = MeshConvention(conv, 2**self.s)
        elif conv.N != 2**self.s:
            raise DomainError(f"mesh has {conv.N} points but s = {self.s}")
        object.__setattr__(self, "convention", conv)

    @property
    def window(self) -> float:
        return 2 * math.pi / self.t

    @property
    def bin_width(self) -> float:
        return self.window / 2**self.w

    @property
    def dt(self) -> float:
        return self.t / self.n

    def energies(self) -> np.ndarray:
        return self.e_ref - self.bin_width * np.arange(2**self.w)

    def power_schedule(self, k: int) -> tuple[float, int]:
        """``(step size, step count)`` realising ``U^{2^k}``."""
        if self.power_mode == REPEAT:
            return self.dt, self.n * 2**k
        return self.dt * 2**k, self.n


def calibrate_e_ref(target_energy: float, t: float) -> float:
    """Smallest multiple of the window ``2 pi/t`` at or above ``target_energy``.

    The target then lands inside ``(E_ref - 2 pi/t, E_ref]``, so the bins read
    physical energies directly.
    """
    window = 2 * math.pi / t
    return math.ceil(target_energy / window - 1e-12) * window


@dataclass
class SpectrumResult:
    energies: np.ndarray
    probabilities: np.ndarray
    conditioned: dict[int, SampledWavefunction] = field(default_factory=dict)
    config: PhaseEstimationConfig | None = None

    @property
    def bin_width(self) -> float:
        return float(abs(self.energies[0] - self.energies[1])) if len(self.energies) > 1 else math.inf

    @property
    def dominant_bin(self) -> int:
        return int(np.argmax(self.probabilities))

    @property
    def dominant_energy(self) -> float:
        return float(self.energies[self.dominant_bin])

    def nearest_bin(self, energy: float) -> int:
        return int(np.argmin(np.abs(self.energies - energy)))

    def peak_weight(self, energy: float) -> float:
        """Probability in the bins lying less than one bin width from ``energy``."""
        near = np.abs(self.energies - energy) < self.bin_width
        return float(self.probabilities[near].sum())

    def local_maxima(self) -> list[int]:
        """Bins strictly above both neighbours along the energy axis (no wraparound)."""
        order = np.argsort(self.energies)
        p = self.probabilities[order]
        return [
            int(order[i])
            for i in range(len(p))
            if (i == 0 or p[i] > p[i - 1]) and (i == len(p) - 1 or p[i] > p[i + 1])
        ]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("energy,probability\n")
            for e, p in zip(self.energies, self.probabilities):
                fh.write(f"{e:.17g},{p:.17g}\n")


class DiagonalToyModel:
    """Hamiltonian diagonal in the register basis; its evolution is exact."""

    def __init__(self, energies: Sequence[float]):
        self.energies = np.asarray(energies, dtype=float)

    def check(self, conv: MeshConvention) -> None:
        if self.energies.size != conv.N:
            raise DomainError(f"toy model has {self.energies.size} levels, mesh {conv.N} points")

    def step_circuit(self, dt: float, conv: MeshConvention) -> Circuit:
        s = conv.s
        circ = Circuit(s)
        for b, e in enumerate(self.energies):
            bits = format(b, f"0{s}b")
            circ.append(global_phase(-e * dt, [(q, int(bits[q])) for q in range(s)]))
        return circ


def _work_slice(tensor: np.ndarray, position: int) -> np.ndarray:
    return tensor[(slice(None),) * position + (1,)]


def _controlled_power_inplace(tensor: np.ndarray, pot, cfg: PhaseEstimationConfig, k: int) -> None:
    branch = _work_slice(tensor, cfg.w - 1 - k)
    dt, steps = cfg.power_schedule(k)
    step = pot.step_circuit(dt, cfg.convention)
    for _ in range(steps):
        apply_circuit_inplace(branch, step, cfg.s)
    # e^{+i E_ref 2^k t}: the shift of H by -E_ref as a controlled global phase
    branch *= np.exp(1j * cfg.e_ref * cfg.t * 2**k)


def controlled_power_evolution(state: StateVector, pot, cfg: PhaseEstimationConfig, k: int) -> StateVector:
    """Apply ``U(t)^{2^k}`` to the simulation register where work qubit ``k`` is 1."""
    if not 0 <= k < cfg.w:
        raise DomainError(f"work qubit index {k} out of range for w = {cfg.w}")
    if state.num_qubits != cfg.w + cfg.s:
        raise DomainError(f"state has {state.num_qubits} qubits, expected {cfg.w + cfg.s}")
    pot.check(cfg.convention)
    t = state.tensor()
    _controlled_power_inplace(t, pot, cfg, k)
    return StateVector(t)


def _warn_aliasing(pot, cfg: PhaseEstimationConfig) -> None:
    from .reference import analytic_levels

    try:
        levels = analytic_levels(pot, 3)
    except DomainError:
        return
    bins = [round(((cfg.e_ref - e) / cfg.bin_width)) % 2**cfg.w for e in levels]
    if len(set(bins)) < len(bins):
        warnings.warn(
            f"analytic levels {levels} alias onto bins {bins} in a window of {cfg.window:.6g}",
            stacklevel=3,
        )


def phase_estimate(initial: SampledWavefunction, pot, cfg: PhaseEstimationConfig) -> SpectrumResult:
    """Exact outcome distribution of the work register plus the conditioned states."""
    conv = cfg.convention
    if initial.convention != conv:
        raise DomainError("initial state was sampled on a different mesh")
    pot.check(conv)
    _warn_aliasing(pot, cfg)
    w, s = cfg.w, cfg.s
    sim = encode_wavefunction(initial).amplitudes
    work = np.zeros(2**w, dtype=np.complex128)
    work[0] = 1.0
    tensor = np.kron(work, sim).reshape((2,) * (w + s))
    prep = Circuit(w + s, [hadamard(q) for q in range(w)])
    apply_circuit_inplace(tensor, prep, w + s)
    for k in range(w):
        _controlled_power_inplace(tensor, pot, cfg, k)
    apply_circuit_inplace(tensor, qft_circuit(w, inverse=True, num_qubits=w + s), w + s)
    final = StateVector(tensor)
    work_qubits = list(range(w))
    probs = marginal_probabilities(final, work_qubits)
    conditioned = {}
    for m in np.flatnonzero(probs > cfg.keep_threshold):
        sub, _ = condition_on_outcome(final, work_qubits, int(m))
        conditioned[int(m)] = decode_wavefunction(sub, conv)
    return SpectrumResult(cfg.energies(), probs, conditioned, cfg)


@dataclass(frozen=True)
class PhaseAnchor:
    """Where the projected eigenfunction is made real and positive; ``None`` = largest amplitude."""

    x: float | None = None

    @classmethod
    def real_at(cls, x: float) -> PhaseAnchor:
        return cls(float(x))

    @classmethod
    def max_amplitude(cls) -> PhaseAnchor:
        return cls(None)


def project_eigenfunction(
    result: SpectrumResult, m: int, anchor: PhaseAnchor | None = None
) -> SampledWavefunction:
    if m not in result.conditioned:
        p = result.probabilities[m] if 0 <= m < len(result.probabilities) else 0.0
        raise DomainError(f"bin {m} has probability {p:.3g}; no conditioned state retained")
    psi = result.conditioned[m]
    vals = psi.values
    anchor = anchor or PhaseAnchor()
    if anchor.x is None:
        idx = int(np.argmax(np.abs(vals)))
    else:
        idx = int(np.argmin(np.abs(psi.x - anchor.x)))
        if abs(vals[idx]) < 1e-8 * np.abs(vals).max():
            warnings.warn(
                f"amplitude vanishes at x = {psi.x[idx]:.6g}; anchoring at the largest amplitude",
                stacklevel=2,
            )
            idx = int(np.argmax(np.abs(vals)))
    phase = vals[idx] / abs(vals[idx])
    return SampledWavefunction(psi.convention, vals / phase)


def random_wavefunctions(conv: MeshConvention, count: int, seed=None) -> list[SampledWavefunction]:
    """Independent standard complex Gaussian amplitudes, normalized; one stream per state."""
    if count < 1:
        raise DomainError("count must be at least 1")
    streams = np.random.SeedSequence(seed).spawn(count)
    out = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        z = rng.standard_normal(conv.N) + 1j * rng.standard_normal(conv.N)
        out.append(SampledWavefunction(conv, z).normalized())
    return out


def average_spectra(results: Sequence[SpectrumResult]) -> SpectrumResult:
    probs = np.mean([r.probabilities for r in results], axis=0)
    return SpectrumResult(results[0].energies.copy(), probs, {}, results[0].config)


def random_state_average(pot, cfg: PhaseEstimationConfig, count: int, seed=None) -> SpectrumResult:
    states = random_wavefunctions(cfg.convention, count, seed)
    return average_spectra([phase_estimate(psi, pot, cfg) for psi in states])
