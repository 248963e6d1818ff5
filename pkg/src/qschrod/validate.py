"""Self-check suite behind ``qschrod validate``.

Every check compares a circuit against an independently computed quantity
(dense matrices, the DFT, analytic levels) and reports measured vs bound.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .evolution import Coulomb, Harmonic, SquareWell, TrotterConfig, coulomb_surrogate, kinetic_circuit
from .lowering import lower_circuit
from .mesh import MeshConvention, SampledWavefunction, decode_wavefunction, encode_wavefunction, mesh_points, qft_circuit
from .phase_estimation import DiagonalToyModel, PhaseEstimationConfig, phase_estimate
from .reference import dense_hamiltonian, square_well_levels
from .register import PHASE, Circuit, StateVector, apply_circuit, circuit_unitary

# per-step window where the leading error term dominates at s = 4
PER_STEP_WINDOW = (1e-5, 1e-3)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    bound: str
    seconds: float = 0.0


def standard_potentials() -> list[tuple[object, MeshConvention]]:
    return [
        (Harmonic(100.0), MeshConvention.asymmetric()),
        (SquareWell(100.0), MeshConvention.symmetric()),
        (Coulomb(10.0), MeshConvention.symmetric()),
    ]


def dft_matrix(N: int) -> np.ndarray:
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return np.exp(2j * np.pi * j * k / N) / math.sqrt(N)


def perturb_first_rotation(circ: Circuit, delta: float = 1e-3) -> Circuit:
    """Copy of ``circ`` with the first controlled rotation off by ``delta`` (negative control)."""
    gates = list(circ.gates)
    for i, g in enumerate(gates):
        if g.kind == PHASE and g.controls:
            gates[i] = replace(g, angle=g.angle + delta)
            break
    return Circuit(circ.num_qubits, gates)


def qft_error(s: int, fault: bool = False) -> float:
    circ = qft_circuit(s)
    if fault:
        circ = perturb_first_rotation(circ)
    # column j of the circuit unitary is the image of |j>
    return float(np.abs(circuit_unitary(circ) - dft_matrix(2**s).T).max())


def trotter_step_error(pot, conv: MeshConvention, dt: float) -> float:
    h = dense_hamiltonian(pot, conv)
    u = circuit_unitary(pot.step_circuit(dt, conv))
    return float(np.linalg.norm(u - h.propagator(dt, encoded=True), 2))


def trotter_global_error(pot, conv: MeshConvention, t: float, n: int) -> float:
    h = dense_hamiltonian(pot, conv)
    u = np.linalg.matrix_power(circuit_unitary(pot.step_circuit(t / n, conv)), n)
    return float(np.linalg.norm(u - h.propagator(t, encoded=True), 2))


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def per_step_slope(pot, conv, lo: float, hi: float, points: int = 9) -> tuple[float, np.ndarray, np.ndarray]:
    dts = np.logspace(math.log10(lo), math.log10(hi), points)
    errs = np.array([trotter_step_error(pot, conv, dt) for dt in dts])
    return loglog_slope(dts, errs), dts, errs


def global_slope(pot, conv, t: float = 0.01, steps=(10, 20, 40, 80, 160, 320, 640)) -> float:
    errs = [trotter_global_error(pot, conv, t, n) for n in steps]
    return loglog_slope([t / n for n in steps], errs)


def _all_circuits(rng_dt: float = 0.01) -> list[tuple[str, Circuit]]:
    out = [(f"qft s={s}", qft_circuit(s)) for s in range(1, 5)]
    for pot, conv in standard_potentials():
        name = type(pot).__name__
        out.append((f"{name} half step", pot.half_step_circuit(rng_dt, conv)))
        out.append((f"{name} Trotter step", pot.step_circuit(rng_dt, conv)))
    out.append(("kinetic", kinetic_circuit(TrotterConfig(rng_dt, MeshConvention.symmetric()))))
    return out


def _check_qft(fault: bool):
    err = max(qft_error(s, fault) for s in range(1, 7))
    return err < 1e-10, f"{err:.2e}", "< 1e-10"


def _check_roundtrip(fault: bool):
    rng = np.random.default_rng(1)
    worst = 0.0
    for conv in (MeshConvention.asymmetric(), MeshConvention.symmetric()):
        psi = SampledWavefunction(conv, rng.normal(size=16) + 1j * rng.normal(size=16)).normalized()
        back = decode_wavefunction(encode_wavefunction(psi), conv)
        worst = max(worst, float(np.abs(back.values - psi.values).max()))
    return worst < 1e-12, f"{worst:.2e}", "< 1e-12"


def _check_norm(fault: bool):
    rng = np.random.default_rng(2)
    worst = 0.0
    for _, circ in _all_circuits():
        for _ in range(100):
            z = rng.normal(size=2**circ.num_qubits) + 1j * rng.normal(size=2**circ.num_qubits)
            out = apply_circuit(StateVector(z / np.linalg.norm(z)), circ)
            worst = max(worst, abs(out.norm() - 1.0))
    return worst < 1e-10, f"{worst:.2e}", "< 1e-10"


def _check_diagonals(fault: bool):
    dt, worst = 0.013, 0.0
    for pot, conv in standard_potentials():
        diag = np.diag(circuit_unitary(pot.half_step_circuit(dt, conv)))
        want = np.exp(-1j * pot.values(conv) * dt / 2)
        worst = max(worst, float(np.abs(diag - want).max()))
    return worst < 1e-12, f"{worst:.2e}", "< 1e-12"


def _check_per_step(fault: bool):
    slopes = [per_step_slope(p, c, *PER_STEP_WINDOW)[0] for p, c in standard_potentials()]
    ok = all(abs(s - 3.0) <= 0.2 for s in slopes)
    lo, hi = PER_STEP_WINDOW
    return ok, ", ".join(f"{s:.3f}" for s in slopes), f"3.0 +- 0.2 over dt in [{lo:g}, {hi:g}]"


def _check_global(fault: bool):
    slopes = [global_slope(p, c) for p, c in standard_potentials()]
    ok = all(abs(s - 2.0) <= 0.2 for s in slopes)
    return ok, ", ".join(f"{s:.3f}" for s in slopes), "2.0 +- 0.2"


def _check_lowering(fault: bool):
    worst_err, worst_arity = 0.0, 0
    for _, circ in _all_circuits():
        low = lower_circuit(circ)
        worst_arity = max(worst_arity, low.max_arity)
        worst_err = max(worst_err, float(np.abs(circuit_unitary(low) - circuit_unitary(circ)).max()))
    ok = worst_arity <= 2 and worst_err < 1e-10
    return ok, f"arity {worst_arity}, unitary err {worst_err:.2e}", "arity <= 2, err < 1e-10"


def _check_kinetic_count(fault: bool):
    counts = []
    for s in range(2, 7):
        circ = kinetic_circuit(TrotterConfig(0.01, MeshConvention.symmetric(2**s)))
        counts.append(circ.arity_histogram().get(2, 0) == s * (s - 1) // 2)
    return all(counts), f"{sum(counts)}/{len(counts)} widths match", "s(s-1)/2 two-qubit gates"


def _check_toy_phase_estimation(fault: bool):
    cfg = PhaseEstimationConfig(w=4, s=2, t=1.0, n=1, e_ref=0.0, convention="symmetric")
    toy = DiagonalToyModel(-cfg.bin_width * np.array([3, 3, 3, 3]))
    psi = SampledWavefunction(cfg.convention, np.ones(4) / 2)
    res = phase_estimate(psi, toy, cfg)
    p = res.probabilities[3]
    shifted = phase_estimate(psi, toy, replace(cfg, e_ref=cfg.bin_width))
    rolled = float(np.abs(np.roll(res.probabilities, 1) - shifted.probabilities).max())
    ok = abs(p - 1) < 1e-10 and rolled < 1e-12
    return ok, f"p={p:.12f}, roll err {rolled:.1e}", "p = 1 +- 1e-10, exact roll"


def _check_well_levels(fault: bool):
    levels = [e for e, _ in square_well_levels(100.0, 0.25)]
    want = [-88.12, -54.05, -7.005]
    err = max(abs(a - b) for a, b in zip(levels, want)) if len(levels) == 3 else math.inf
    return err <= 0.01, ", ".join(f"{e:.4f}" for e in levels), "3 levels within 0.01 of -88.12, -54.05, -7.005"


def _check_coulomb_surrogate(fault: bool):
    conv = MeshConvention.symmetric()
    exact = 1 / np.abs(mesh_points(conv))
    err = float(np.abs(coulomb_surrogate(conv) / exact - 1).max())
    return err <= 0.016, f"{err:.4f}", "<= 0.016"


def _check_dense_equivalence(fault: bool):
    dt, worst = 0.004, 0.0
    for pot, conv in standard_potentials():
        v = np.exp(-1j * pot.values(conv) * dt / 2)
        h0 = dense_hamiltonian(None, conv)
        kin = h0.propagator(dt, encoded=True)
        split = (v[:, None] * kin) * v[None, :]
        worst = max(worst, float(np.abs(circuit_unitary(pot.step_circuit(dt, conv)) - split).max()))
    return worst < 1e-10, f"{worst:.2e}", "< 1e-10"


CHECKS: list[tuple[str, Callable[[bool], tuple[bool, str, str]]]] = [
    ("QFT equals DFT (s <= 6)", _check_qft),
    ("encode/decode round trip", _check_roundtrip),
    ("norm preservation, 100 random states", _check_norm),
    ("potential diagonals match phase formula", _check_diagonals),
    ("Trotter step equals dense split product", _check_dense_equivalence),
    ("per-step Trotter error slope", _check_per_step),
    ("global Trotter error slope", _check_global),
    ("lowering: arity and unitary", _check_lowering),
    ("kinetic two-qubit gate count", _check_kinetic_count),
    ("phase estimation on diagonal toy model", _check_toy_phase_estimation),
    ("square-well analytic levels", _check_well_levels),
    ("Coulomb truncated reciprocal accuracy", _check_coulomb_surrogate),
]


def run_checks(inject_fault: str | None = None) -> list[CheckResult]:
    results = []
    for name, check in CHECKS:
        fault = inject_fault == "qft" and check is _check_qft
        start = time.perf_counter()
        ok, measured, bound = check(fault)
        results.append(CheckResult(name, bool(ok), measured, bound, time.perf_counter() - start))
    return results


def per_step_table(points: int = 7) -> list[tuple[float, float, float | None]]:
    """``(dt, error, local slope)`` rows for the harmonic oscillator over ``[1e-5, 1e-2]``."""
    pot, conv = standard_potentials()[0]
    dts = np.logspace(-5, -2, points)
    errs = [trotter_step_error(pot, conv, dt) for dt in dts]
    rows = []
    for i, (dt, e) in enumerate(zip(dts, errs)):
        local = loglog_slope(dts[i - 1 : i + 1], errs[i - 1 : i + 1]) if i else None
        rows.append((float(dt), e, local))
    return rows
