"""Small dense complex linear algebra used throughout the package.

Kets are 1-D complex numpy arrays and operators are 2-D complex arrays.
Nothing here is clever; it is the shared vocabulary for the other modules.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by the whole package."""

    algebraic: float = 1e-10
    optimization: float = 1e-8
    norm: float = 1e-12
    purity: float = 1e-7
    compat: float = 1e-12


TOL = Tolerances()


def as_ket(v) -> np.ndarray:
    """Return ``v`` as a finite 1-D complex array."""
    a = np.asarray(v, dtype=complex)
    if a.ndim != 1 or a.size == 0:
        raise ValueError(f"a ket must be a non-empty 1-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("ket has non-finite entries")
    return a


def inner(a, b) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def normalize(v) -> np.ndarray:
    a = as_ket(v)
    n = np.linalg.norm(a)
    if n == 0:
        raise ValueError("cannot normalize the zero vector")
    return a / n


def canonical_phase(v, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real and positive."""
    a = as_ket(v)
    scale = np.max(np.abs(a))
    if scale == 0:
        return a.copy()
    idx = int(np.argmax(np.abs(a) > tol * scale))
    out = a * (abs(a[idx]) / a[idx])
    out[idx] = abs(a[idx])
    return out


def fidelity(a, b) -> float:
    """|<a|b>|^2 for normalized kets."""
    return abs(inner(a, b)) ** 2


def projector(v) -> np.ndarray:
    a = as_ket(v)
    return np.outer(a, a.conj())


def frame_operator(kets) -> np.ndarray:
    """Sum of |k><k| over the rows of ``kets``."""
    k = np.asarray(kets, dtype=complex)
    return k.T @ k.conj()


def is_hermitian(m, tol: float = TOL.algebraic) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=tol, rtol=0)


def hermitian_eig(m, tol: float = TOL.algebraic) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray
        Real, ascending.
    eigenvectors : ndarray
        Columns are orthonormal eigenvectors, ``eigenvectors[:, i]`` belongs to
        ``eigenvalues[i]``.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian")
    return np.linalg.eigh((m + m.conj().T) / 2)


def largest_eigenvalue(m) -> float:
    return float(hermitian_eig(m)[0][-1])


def is_density_matrix(rho, tol: float = TOL.algebraic) -> bool:
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, tol):
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return bool(hermitian_eig(rho, tol)[0][0] >= -1e-10)


def purity(rho) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


# -- qubit Bloch maps -------------------------------------------------------

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def bloch_to_state(r, tol: float = 1e-10) -> np.ndarray:
    """Pure qubit ket cos(t/2)|0> + e^{ip} sin(t/2)|1> for the unit Bloch vector ``r``."""
    x, y, z = (float(c) for c in r)
    length = np.sqrt(x * x + y * y + z * z)
    if abs(length - 1) > tol:
        raise ValueError(f"Bloch vector must have unit length, got {length}")
    theta = np.arctan2(np.hypot(x, y), z)
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)


def state_to_bloch(psi) -> np.ndarray:
    """Bloch vector of a qubit ket (normalized internally)."""
    a, b = normalize(psi)
    ab = np.conj(a) * b
    return np.array([2 * ab.real, 2 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


def density_to_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return np.real([np.trace(rho @ p) for p in (PAULI_X, PAULI_Y, PAULI_Z)])
