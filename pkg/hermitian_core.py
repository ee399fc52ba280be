"""
Dense complex linear algebra shared by every module.

Matrices are plain numpy arrays (complex128, square). Units: hbar = 1, so
energies and times are dimensionless conjugates.
"""

from typing import NamedTuple

import numpy as np

from geometry_errors import ConvergenceFailure, DomainError, NotHermitian, NotPSD
from settings import DEFAULT_TOL


class HermitianEigen(NamedTuple):
    """Eigenpairs of a Hermitian matrix: ascending values, orthonormal columns."""
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(A):
    """Coerce A to a square complex128 array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DomainError(f"expected a non-empty square matrix, got shape {M.shape}")
    return M


def dagger(A):
    return np.conj(np.asarray(A)).T


def is_hermitian(A, tol=DEFAULT_TOL):
    M = as_matrix(A)
    return bool(np.max(np.abs(M - M.conj().T)) <= tol)


def is_unitary(A, tol=DEFAULT_TOL):
    M = as_matrix(A)
    return bool(np.max(np.abs(M @ M.conj().T - np.eye(M.shape[0]))) <= tol)


def is_psd(A, tol=DEFAULT_TOL):
    if not is_hermitian(A, tol):
        return False
    values = np.linalg.eigvalsh(_hermitian_part(as_matrix(A)))
    return bool(values[0] >= -tol)


def _hermitian_part(M):
    return 0.5 * (M + M.conj().T)


def _fix_column_phases(vectors):
    # Largest-magnitude component of each column made real positive;
    # argmax picks the first index on ties.
    pivots = np.argmax(np.abs(vectors), axis=0)
    pivot_values = vectors[pivots, np.arange(vectors.shape[1])]
    phases = np.exp(-1j * np.angle(pivot_values))
    return vectors * phases


def eig_hermitian(A, tol=DEFAULT_TOL) -> HermitianEigen:
    """
    Eigendecomposition of a Hermitian matrix.

    Args:
        A: Square matrix, Hermitian within tol
        tol: Hermiticity tolerance (max absolute entry of A - A^dagger)

    Returns:
        HermitianEigen with ascending eigenvalues and the column phase
        convention applied (largest-magnitude component real positive)
    """
    M = as_matrix(A)
    if not is_hermitian(M, tol):
        raise NotHermitian(
            f"matrix is not Hermitian within tol={tol:g} "
            f"(max deviation {np.max(np.abs(M - M.conj().T)):.3e})"
        )
    try:
        values, vectors = np.linalg.eigh(_hermitian_part(M))
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"Hermitian eigensolver did not converge: {e}") from e
    return HermitianEigen(values=values, vectors=_fix_column_phases(vectors))


def matrix_sqrt_psd(A, tol=DEFAULT_TOL):
    """
    Principal square root of a positive semidefinite matrix.

    Eigenvalues in [-tol, 0) are clamped to zero; anything below -tol raises NotPSD.
    """
    eigen = eig_hermitian(A, tol)
    if eigen.values[0] < -tol:
        raise NotPSD(f"matrix has eigenvalue {eigen.values[0]:.3e} below -tol={tol:g}")
    roots = np.sqrt(np.clip(eigen.values, 0.0, None))
    S = (eigen.vectors * roots) @ eigen.vectors.conj().T
    return _hermitian_part(S)


def polar_unitary(M):
    """
    Polar decomposition M = |M| U.

    Returns:
        (absM, U) with absM = sqrt(M M^dagger) Hermitian PSD and U unitary.
        For singular M, U is one valid completion; Tr absM is unique.
    """
    M = as_matrix(M)
    # M M^dagger is PSD up to rounding, so clamp generously relative to its scale
    gram = _hermitian_part(M @ M.conj().T)
    scale = max(1.0, float(np.max(np.abs(gram))))
    absM = matrix_sqrt_psd(gram, tol=DEFAULT_TOL * scale)
    try:
        W, _, Vh = np.linalg.svd(M)
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"SVD did not converge: {e}") from e
    return absM, W @ Vh


def unitary_exp(H, t, tol=DEFAULT_TOL):
    """U = exp(-i H t) via the eigendecomposition of H."""
    eigen = eig_hermitian(H, tol)
    phases = np.exp(-1j * eigen.values * t)
    return (eigen.vectors * phases) @ eigen.vectors.conj().T
