"""Dense complex linear algebra used by the walk simulator.

All operators live on the joint space ``coin (x) walker`` with the coin index
outermost, so a joint vector of length ``2*d`` is ``[coin-0 block, coin-1 block]``.
"""

from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10


class LinalgError(Exception):
    """Base class for linear-algebra failures."""


class NotHermitian(LinalgError):
    pass


class NoConvergence(LinalgError):
    pass


class DimensionMismatch(LinalgError, ValueError):
    pass


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _square(m, name="matrix"):
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    return m


def is_hermitian(m, tol=HERMITIAN_TOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def hermitian_eig(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Hermitian matrix (checked elementwise to 1e-12).

    Returns
    -------
    Spectrum
        Ascending real eigenvalues and orthonormal eigenvector columns.
    """
    m = _square(m)
    if not is_hermitian(m):
        raise NotHermitian("matrix is not Hermitian within %g" % HERMITIAN_TOL)
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return Spectrum(w, v)


def unitary_exp(m, scale=1.0):
    """Return ``exp(i * scale * m)`` for Hermitian ``m``."""
    w, v = hermitian_eig(m)
    return (v * np.exp(1j * scale * w)) @ v.conj().T


def kron(a, b):
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def _joint(rho, d):
    rho = _square(rho, "rho")
    if rho.shape[0] != 2 * d:
        raise DimensionMismatch(f"expected {2 * d}x{2 * d} joint matrix, got {rho.shape}")
    return rho.reshape(2, d, 2, d)


def partial_trace_coin(rho, d):
    """Trace out the coin, leaving the d x d walker density matrix."""
    r = _joint(rho, d)
    return np.einsum("iaib->ab", r)


def partial_transpose_coin(rho, d):
    """Transpose the coin factor of a joint ``2d x 2d`` operator."""
    r = _joint(rho, d)
    return r.transpose(2, 1, 0, 3).reshape(2 * d, 2 * d)


def dft_matrix(d):
    """Unitary DFT matrix ``F[m, n] = exp(2j*pi*m*n/d) / sqrt(d)``.

    Column ``m`` is the phase state ``|phi_m>`` expressed in the Fock basis.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def max_unitarity_error(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
