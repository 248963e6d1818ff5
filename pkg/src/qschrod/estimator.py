"""scikit-learn style front end to the phase-estimation spectrum.

Rows of ``X`` are wavefunctions sampled on the mesh (``2**sim_qubits``
complex values each). ``transform`` returns the work-register outcome
distribution per row; ``predict`` returns the energy of the most probable bin.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DomainError
from .config import POTENTIALS
from .mesh import MeshConvention, SampledWavefunction, mesh_points
from .phase_estimation import (
    REPEAT,
    RESCALE,
    PhaseAnchor,
    PhaseEstimationConfig,
    SpectrumResult,
    calibrate_e_ref,
    phase_estimate,
    project_eigenfunction,
)
from .reference import analytic_levels


def check_wavefunctions(X, n_points: int, normalize: bool = True) -> np.ndarray:
    """Validate ``X`` as a 2-D complex array of wavefunction samples.

    A single 1-D wavefunction is promoted to one row. Rows must be finite and
    non-zero; they are rescaled to unit norm unless ``normalize`` is false.
    """
    X = np.asarray(X)
    if X.dtype == object or not (np.issubdtype(X.dtype, np.number) or X.dtype == bool):
        raise DomainError(f"wavefunction samples must be numeric, got dtype {X.dtype}")
    X = X.astype(np.complex128)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise DomainError(f"expected a 2-D array of wavefunctions, got {X.ndim} dimensions")
    if X.shape[1] != n_points:
        raise DomainError(f"each wavefunction needs {n_points} samples, got {X.shape[1]}")
    if X.shape[0] == 0:
        raise DomainError("no wavefunctions given")
    if not np.all(np.isfinite(X)):
        raise DomainError("wavefunction samples contain NaN or infinity")
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise DomainError("zero wavefunction cannot be normalized")
    return X / norms[:, None] if normalize else X


class QuantumSpectrumEstimator(TransformerMixin, BaseEstimator):
    """Energy spectrum of wavefunctions via simulated quantum phase estimation.

    Parameters
    ----------
    potential : {"harmonic", "square_well", "coulomb"}
    omega, v0, kappa : float
        Strength of the harmonic, square-well and Coulomb potentials; only
        the one matching ``potential`` is used.
    work_qubits, sim_qubits : int
        Widths of the work (energy) and simulation (mesh) registers.
    time : float
        Evolution time ``t``; the energy window is ``2 pi / t``.
    trotter_steps : int
        Steps per application of ``U(t)``.
    e_ref : float or "auto"
        Top of the energy window. ``"auto"`` puts the lowest analytic level in it.
    convention : {"symmetric", "asymmetric"}
    power_mode : {"rescale", "repeat"}
    """

    def __init__(
        self,
        potential="harmonic",
        omega=100.0,
        v0=100.0,
        kappa=10.0,
        work_qubits=4,
        sim_qubits=4,
        time=0.045,
        trotter_steps=30,
        e_ref="auto",
        convention="asymmetric",
        power_mode=RESCALE,
    ):
        self.potential = potential
        self.omega = omega
        self.v0 = v0
        self.kappa = kappa
        self.work_qubits = work_qubits
        self.sim_qubits = sim_qubits
        self.time = time
        self.trotter_steps = trotter_steps
        self.e_ref = e_ref
        self.convention = convention
        self.power_mode = power_mode

    def _potential(self):
        if self.potential not in POTENTIALS:
            raise DomainError(f"potential must be one of {', '.join(POTENTIALS)}, got {self.potential!r}")
        cls, key = POTENTIALS[self.potential]
        return cls(float(getattr(self, key)))

    def fit(self, X=None, y=None):
        """Validate parameters and fix the energy grid; ``X`` is only shape-checked."""
        if self.power_mode not in (REPEAT, RESCALE):
            raise DomainError(f"power_mode must be {REPEAT!r} or {RESCALE!r}")
        pot = self._potential()
        conv = MeshConvention(self.convention, 2 ** int(self.sim_qubits))
        pot.check(conv)
        if isinstance(self.e_ref, str):
            if self.e_ref != "auto":
                raise DomainError("e_ref must be a number or 'auto'")
            e_ref = calibrate_e_ref(analytic_levels(pot, 1)[0], self.time)
        else:
            e_ref = float(self.e_ref)
        self.config_ = PhaseEstimationConfig(
            w=int(self.work_qubits),
            s=int(self.sim_qubits),
            t=float(self.time),
            n=int(self.trotter_steps),
            e_ref=e_ref,
            convention=conv,
            power_mode=self.power_mode,
        )
        self.potential_ = pot
        self.energies_ = self.config_.energies()
        self.mesh_ = mesh_points(conv)
        if X is not None:
            check_wavefunctions(X, conv.N)
        return self

    def spectra(self, X) -> list[SpectrumResult]:
        check_is_fitted(self, "config_")
        rows = check_wavefunctions(X, self.config_.convention.N)
        conv = self.config_.convention
        return [phase_estimate(SampledWavefunction(conv, r), self.potential_, self.config_) for r in rows]

    def transform(self, X) -> np.ndarray:
        """Outcome probabilities, shape ``(n_samples, 2**work_qubits)``."""
        return np.array([r.probabilities for r in self.spectra(X)])

    def predict(self, X) -> np.ndarray:
        """Energy of the dominant bin for each wavefunction."""
        return np.array([r.dominant_energy for r in self.spectra(X)])

    def project(self, x, bin="peak", anchor_x=None) -> np.ndarray:
        """Normalized state conditioned on ``bin`` (``"peak"`` = dominant) for one wavefunction."""
        (res,) = self.spectra(np.asarray(x)[None, ...] if np.ndim(x) == 1 else x)
        m = res.dominant_bin if bin == "peak" else int(bin)
        return project_eigenfunction(res, m, PhaseAnchor(anchor_x)).values
