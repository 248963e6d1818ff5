import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qschrod import QuantumSpectrumEstimator, check_wavefunctions
from qschrod.errors import DomainError
from qschrod.mesh import MeshConvention
from qschrod.reference import initial_state_library


def ho_rows(*names):
    conv = MeshConvention.asymmetric()
    return np.array([initial_state_library(n, conv).values for n in names])


def test_params_round_trip():
    est = QuantumSpectrumEstimator(time=0.03, trotter_steps=20)
    params = est.get_params()
    assert params["time"] == 0.03 and params["potential"] == "harmonic"
    again = clone(est).set_params(trotter_steps=7)
    assert again.trotter_steps == 7 and est.trotter_steps == 20


def test_fit_transform_predict():
    X = ho_rows("gaussian", "x_gaussian")
    est = QuantumSpectrumEstimator(time=0.045, trotter_steps=30).fit(X)
    assert est.config_.e_ref == pytest.approx(2 * np.pi / 0.045)
    P = est.transform(X)
    assert P.shape == (2, 16)
    assert np.allclose(P.sum(axis=1), 1.0)
    E = est.predict(X[:1])
    assert E[0] == pytest.approx(52.36, abs=0.01)
    assert P[0].max() == pytest.approx(0.915, abs=0.001)


def test_unnormalized_rows_are_normalized():
    X = ho_rows("gaussian")
    est = QuantumSpectrumEstimator(trotter_steps=5).fit()
    assert np.allclose(est.transform(3.0 * X), est.transform(X))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        QuantumSpectrumEstimator().transform(ho_rows("gaussian"))


def test_bad_parameters():
    with pytest.raises(DomainError):
        QuantumSpectrumEstimator(potential="morse").fit()
    with pytest.raises(DomainError):
        QuantumSpectrumEstimator(power_mode="doubling").fit()
    with pytest.raises(DomainError):
        QuantumSpectrumEstimator(potential="coulomb", convention="asymmetric").fit()
    with pytest.raises(DomainError):
        QuantumSpectrumEstimator(e_ref="top").fit()


def test_project_peak():
    X = ho_rows("gaussian")
    est = QuantumSpectrumEstimator(trotter_steps=30).fit()
    phi = est.project(X[0], anchor_x=0.0)
    assert phi.shape == (16,)
    assert np.linalg.norm(phi) == pytest.approx(1.0)
    assert phi[8].imag == pytest.approx(0.0, abs=1e-14)


def test_coulomb_estimator():
    conv = MeshConvention.symmetric()
    x = initial_state_library("x_exp10", conv).values
    est = QuantumSpectrumEstimator(potential="coulomb", convention="symmetric", time=0.1, trotter_steps=100)
    assert est.fit().predict(x)[0] == pytest.approx(-51.05, abs=0.01)


def test_check_wavefunctions():
    out = check_wavefunctions([1, 1j, 0, 0], 4)
    assert out.shape == (1, 4) and out.dtype == np.complex128
    assert np.linalg.norm(out[0]) == pytest.approx(1.0)
    raw = check_wavefunctions([[2, 0]], 2, normalize=False)
    assert raw[0, 0] == 2
    with pytest.raises(DomainError):
        check_wavefunctions(np.ones((2, 3)), 4)
    with pytest.raises(DomainError):
        check_wavefunctions([[np.nan, 1]], 2)
    with pytest.raises(DomainError):
        check_wavefunctions([[0, 0]], 2)
    with pytest.raises(DomainError):
        check_wavefunctions(np.ones((1, 2, 2)), 2)
    with pytest.raises(DomainError):
        check_wavefunctions([["a", "b"]], 2)
