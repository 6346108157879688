"""Entanglement measures over reduced density matrices.

The eigensolver is a cyclic complex Jacobi iteration: provably convergent,
free of balancing/deflation corner cases, and exact enough that the entropy
tolerances downstream are set by quadrature, not linear algebra.  Its cost is
O(d^3) per sweep in Python, so above d = 64 the automatic mode switches to
LAPACK (scipy eigvalsh); both paths are cross-checked in the test suite and
agree to 1e-12 on random Hermitian inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .conditioning import ReducedDensity
from .errors import ConvergenceError, MeasureError, NonHermitianError

_JACOBI_MAX_SWEEPS = 60
_JACOBI_AUTO_LIMIT = 64
_CLAMP_WINDOW = 1e-10
_HARD_NEGATIVE = -1e-6


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues in descending order."""

    eigenvalues: np.ndarray
    dim: int


def hermitian_eigenvalues(m: np.ndarray, method: str = "auto") -> Spectrum:
    """Eigenvalues of a Hermitian matrix, descending.

    method: "jacobi", "lapack", or "auto" (jacobi up to d=64, lapack above).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MeasureError(f"expected a square matrix, got shape {m.shape}")
    scale = float(np.max(np.abs(m))) or 1.0
    if float(np.max(np.abs(m - m.conj().T))) > 1e-10 * scale:
        raise NonHermitianError("eigensolver input is not Hermitian within 1e-10")
    d = m.shape[0]
    if method == "auto":
        method = "jacobi" if d <= _JACOBI_AUTO_LIMIT else "lapack"
    if method == "lapack":
        vals = scipy.linalg.eigvalsh(m)
    elif method == "jacobi":
        vals = _jacobi_eigenvalues(m)
    else:
        raise MeasureError(f"unknown eigensolver method {method!r}")
    return Spectrum(eigenvalues=np.sort(vals)[::-1], dim=d)


def _jacobi_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Cyclic complex Jacobi sweeps until the off-diagonal mass is gone."""
    a = m.copy()
    d = a.shape[0]
    if d == 1:
        return a.real.diagonal().copy()
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(d)
    tol = 1e-12 * norm
    # pivots below the threshold cannot lift the off-diagonal mass above tol,
    # and rotating on them would divide by a (sub)normal modulus
    thresh = tol / (2.0 * d)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < tol:
            return a.real.diagonal().copy()
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= thresh:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # unitary 2x2 rotation annihilating a[p, q]; |theta| <= pi/4
                # keeps the cyclic method inside its convergence theory
                phase = apq / abs(apq)
                diff = app - aqq
                if diff == 0.0:
                    theta = 0.25 * np.pi
                else:
                    theta = 0.5 * np.arctan(2.0 * abs(apq) / diff)
                c = np.cos(theta)
                s = np.sin(theta) * phase
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p + np.conj(s) * col_q
                a[:, q] = -s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p + s * row_q
                a[q, :] = -np.conj(s) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    raise ConvergenceError(
        f"Jacobi sweeps did not reach the 1e-12 off-diagonal target in {_JACOBI_MAX_SWEEPS} sweeps"
    )


def density_spectrum(rho: ReducedDensity, method: str = "auto") -> Spectrum:
    """Eigenvalues of a density matrix, validated and clamped to [0, 1]."""
    spec = hermitian_eigenvalues(rho.matrix, method=method)
    vals = spec.eigenvalues
    low = float(vals.min())
    if low < _HARD_NEGATIVE:
        raise MeasureError(
            f"{rho.label}: eigenvalue {low:.3e} below {_HARD_NEGATIVE:.0e};"
            " the conditioned matrix is not a state"
        )
    if abs(float(vals.sum()) - 1.0) > 1e-10:
        raise MeasureError(f"{rho.label}: eigenvalue sum {vals.sum()} deviates from 1")
    clamped = np.clip(vals, 0.0, 1.0)
    clamped[np.abs(vals) <= _CLAMP_WINDOW] = 0.0
    return Spectrum(eigenvalues=clamped, dim=spec.dim)


def von_neumann_entropy(rho: ReducedDensity, method: str = "auto") -> float:
    """S = -Tr rho log2 rho in bits, 0 log 0 = 0."""
    vals = density_spectrum(rho, method=method).eigenvalues
    pos = vals[vals > 0.0]
    return float(-np.sum(pos * np.log2(pos)))


def concurrence(rho: ReducedDensity) -> float:
    """Purity-based generalized concurrence sqrt(2 (1 - Tr rho^2))."""
    purity = float(np.linalg.norm(rho.matrix) ** 2)
    return float(np.sqrt(max(2.0 * (1.0 - purity), 0.0)))


def max_lines(d: int) -> tuple[float, float]:
    """Maximal (entropy, concurrence) for dimension d."""
    if d < 1:
        raise MeasureError(f"dimension must be at least 1, got {d}")
    return (float(np.log2(d)), float(np.sqrt(2.0 - 2.0 / d)))
