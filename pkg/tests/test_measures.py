"""Eigensolvers and entanglement measures on matrices with known spectra."""

import numpy as np
import pytest

from ionent import measures
from ionent.conditioning import ReducedDensity
from ionent.errors import MeasureError, NonHermitianError
from ionent.measures import (
    concurrence,
    density_spectrum,
    hermitian_eigenvalues,
    max_lines,
    von_neumann_entropy,
)


def _haar_unitary(d, rng):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _density(matrix, label="test"):
    m = np.asarray(matrix, dtype=complex)
    return ReducedDensity(dim=m.shape[0], matrix=m, norm=1.0, label=label)


def _random_density(d, rng):
    w = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = w @ w.conj().T
    m /= np.trace(m).real
    m = 0.5 * (m + m.conj().T)
    return _density(m)


# ---------------------------------------------------------------------------
# eigensolvers


@pytest.mark.parametrize("d", [2, 3, 8, 33, 64])
def test_jacobi_agrees_with_lapack(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a + a.conj().T
    jac = hermitian_eigenvalues(m, method="jacobi").eigenvalues
    lap = hermitian_eigenvalues(m, method="lapack").eigenvalues
    scale = np.max(np.abs(lap))
    assert np.max(np.abs(jac - lap)) < 1e-12 * scale
    assert np.all(np.diff(jac) <= 0)  # descending


def test_auto_method_switches_at_limit(rng, monkeypatch):
    calls = []
    orig = measures._jacobi_eigenvalues
    monkeypatch.setattr(
        measures, "_jacobi_eigenvalues", lambda m: calls.append(m.shape[0]) or orig(m)
    )
    small = np.eye(measures._JACOBI_AUTO_LIMIT)
    big = np.eye(measures._JACOBI_AUTO_LIMIT + 1)
    hermitian_eigenvalues(small)
    hermitian_eigenvalues(big)
    assert calls == [measures._JACOBI_AUTO_LIMIT]


def test_known_spectrum_survives_conjugation(rng):
    base = np.diag([0.7, 0.3]).astype(complex)
    u = _haar_unitary(2, rng)
    spec = hermitian_eigenvalues(u @ base @ u.conj().T).eigenvalues
    assert np.allclose(spec, [0.7, 0.3], rtol=0, atol=1e-10)


def test_eigensolver_input_guards():
    with pytest.raises(MeasureError):
        hermitian_eigenvalues(np.ones((2, 3)))
    with pytest.raises(NonHermitianError):
        hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(MeasureError):
        hermitian_eigenvalues(np.eye(2), method="qr")


# ---------------------------------------------------------------------------
# entropy and concurrence fixed points


def test_entropy_fixed_points(rng):
    assert von_neumann_entropy(_density(np.eye(2) / 2)) == pytest.approx(1.0, abs=1e-14)
    assert von_neumann_entropy(_density(np.eye(3) / 3)) == pytest.approx(
        np.log2(3), abs=1e-14
    )
    mixed = _density(np.diag([0.5, 0.25, 0.25]))
    assert von_neumann_entropy(mixed) == pytest.approx(1.5, abs=1e-14)
    v = rng.normal(size=5) + 1j * rng.normal(size=5)
    v /= np.linalg.norm(v)
    pure = _density(np.outer(v, v.conj()))
    assert von_neumann_entropy(pure) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(_density([[1.0]])) == 0.0


def test_concurrence_fixed_points(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    assert concurrence(_density(np.outer(v, v.conj()))) == pytest.approx(0.0, abs=1e-7)
    assert concurrence(_density(np.eye(2) / 2)) == pytest.approx(1.0, abs=1e-14)
    assert concurrence(_density(np.eye(3) / 3)) == pytest.approx(
        np.sqrt(4.0 / 3.0), abs=1e-14
    )
    assert concurrence(_density(np.eye(4) / 4)) == pytest.approx(
        np.sqrt(3.0 / 2.0), abs=1e-14
    )


def test_max_lines():
    assert max_lines(2) == (1.0, 1.0)
    s4, c4 = max_lines(4)
    assert s4 == 2.0 and c4 == pytest.approx(np.sqrt(1.5))
    s5, c5 = max_lines(5)
    assert s5 == pytest.approx(np.log2(5)) and c5 == pytest.approx(np.sqrt(1.6))
    with pytest.raises(MeasureError):
        max_lines(0)


def test_measures_unitary_invariant(rng):
    trials = 0
    for d in (2, 3, 4, 16):
        for _ in range(25):
            rho = _random_density(d, rng)
            u = _haar_unitary(d, rng)
            rotated = _density(u @ rho.matrix @ u.conj().T)
            assert von_neumann_entropy(rotated) == pytest.approx(
                von_neumann_entropy(rho), abs=1e-10
            )
            assert concurrence(rotated) == pytest.approx(concurrence(rho), abs=1e-10)
            trials += 1
    assert trials == 100


def test_linear_entropy_bounds_von_neumann(rng):
    """C^2/2 (linear entropy) never exceeds S_vN in nats."""
    for d in (2, 3, 5):
        for _ in range(20):
            rho = _random_density(d, rng)
            s_lin = 0.5 * concurrence(rho) ** 2
            assert s_lin <= von_neumann_entropy(rho) * np.log(2.0) + 1e-12


# ---------------------------------------------------------------------------
# clamping and rejection


def test_roundoff_negative_clamped():
    rho = _density(np.diag([1.0 + 5e-11, -5e-11]))
    spec = density_spectrum(rho)
    assert spec.eigenvalues[1] == 0.0
    assert von_neumann_entropy(rho) == 0.0


def test_genuinely_negative_rejected():
    rho = _density(np.diag([1.0 + 1e-5, -1e-5]))
    with pytest.raises(MeasureError, match="not a state"):
        density_spectrum(rho)


def test_unnormalized_spectrum_rejected():
    bad = ReducedDensity.__new__(ReducedDensity)
    object.__setattr__(bad, "dim", 2)
    object.__setattr__(bad, "matrix", np.diag([0.6, 0.3]).astype(complex))
    object.__setattr__(bad, "norm", 1.0)
    object.__setattr__(bad, "label", "test")
    with pytest.raises(MeasureError, match="deviates from 1"):
        density_spectrum(bad)
