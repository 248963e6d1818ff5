"""Simulated quantum phase estimation for the 1-D Schrodinger equation.

A wavefunction on a ``2**s`` point mesh is loaded into a simulation register,
evolved by Trotterized kinetic/potential phase circuits joined by quantum
Fourier transforms, and its energy spectrum read out by phase estimation.
"""
from .errors import ConfigError, DomainError, UnreachableOutcomeError, UnsupportedConfigurationError
from .evolution import Coulomb, Harmonic, SquareWell, TrotterConfig, evolve, trotter_step_circuit
from .mesh import MeshConvention, SampledWavefunction, decode_wavefunction, encode_wavefunction, qft_circuit
from .phase_estimation import (
    PhaseAnchor,
    PhaseEstimationConfig,
    SpectrumResult,
    calibrate_e_ref,
    phase_estimate,
    project_eigenfunction,
    random_state_average,
)
from .register import Circuit, GateOp, StateVector, apply_circuit
from .estimator import QuantumSpectrumEstimator, check_wavefunctions

__all__ = [
    "Circuit",
    "ConfigError",
    "Coulomb",
    "DomainError",
    "GateOp",
    "Harmonic",
    "MeshConvention",
    "PhaseAnchor",
    "PhaseEstimationConfig",
    "QuantumSpectrumEstimator",
    "SampledWavefunction",
    "SpectrumResult",
    "SquareWell",
    "StateVector",
    "TrotterConfig",
    "UnreachableOutcomeError",
    "UnsupportedConfigurationError",
    "apply_circuit",
    "calibrate_e_ref",
    "check_wavefunctions",
    "decode_wavefunction",
    "encode_wavefunction",
    "evolve",
    "phase_estimate",
    "project_eigenfunction",
    "qft_circuit",
    "random_state_average",
    "trotter_step_circuit",
]
