"""
Distances over arbitrary decompositions and the Bures limit.

Rotating the spectral decomposition of each state by a unitary V gives every
other decomposition of the same state. Minimizing the tuple distance over
those rotations gives

    d^2 = sum_k p_k + sum_k q_k - 2 Tr|M|,    M_kl = sqrt(p_k q_l) <n_k|m_l>

and Tr|M| equals the Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
"""

from dataclasses import dataclass

import numpy as np

from geometry_errors import NotUnitary, RankMismatch
from hermitian_core import as_matrix, is_unitary, matrix_sqrt_psd, polar_unitary
from settings import DEFAULT_TOL
from state_space import DensityOperator


@dataclass(frozen=True, eq=False)
class OverlapMatrix:
    entries: np.ndarray

    @property
    def trace_abs(self):
        absM, _ = polar_unitary(self.entries)
        return float(np.trace(absM).real)

    @property
    def frobenius_sq(self):
        return float(np.sum(np.abs(self.entries) ** 2))


def _weighted_vectors(decomp):
    return decomp.vectors * np.sqrt(decomp.probs)


def overlap_matrix(a, b):
    """Full (unmatched) overlap matrix between two decompositions of equal rank."""
    if a.rank != b.rank:
        raise RankMismatch(f"overlap matrix needs equal ranks, got {a.rank} and {b.rank}")
    return OverlapMatrix(_weighted_vectors(a).conj().T @ _weighted_vectors(b))


def _kept_mass(a, b):
    return float(np.sum(a.probs) + np.sum(b.probs))


def bures_line_element_sq(a, b):
    """Minimum squared tuple distance over all decompositions of the two states."""
    value = _kept_mass(a, b) - 2.0 * overlap_matrix(a, b).trace_abs
    return float(max(value, 0.0))


def uhlmann_fidelity(rho, sigma, tol=DEFAULT_TOL):
    """F = Tr sqrt(sqrt(rho) sigma sqrt(rho)), clipped to [0, 1]."""
    rho = rho if isinstance(rho, DensityOperator) else DensityOperator(rho, tol)
    sigma = sigma if isinstance(sigma, DensityOperator) else DensityOperator(sigma, tol)
    root = matrix_sqrt_psd(rho.matrix, tol)
    inner = root @ sigma.matrix @ root
    value = np.trace(matrix_sqrt_psd(0.5 * (inner + inner.conj().T), tol)).real
    return float(np.clip(value, 0.0, 1.0))


def _check_rotation(V, rank, name, tol):
    V = as_matrix(V)
    if V.shape[0] != rank:
        raise NotUnitary(f"{name} is {V.shape[0]}x{V.shape[0]}, decomposition rank is {rank}")
    if not is_unitary(V, tol):
        raise NotUnitary(f"{name} is not unitary within tol={tol:g}")
    return V


def decomposition_distance_general(a, b, V_a, V_b, tol=DEFAULT_TOL):
    """
    Squared distance between the rotated tuples A V_a and B V_b.

    A and B hold the columns sqrt(p_k) |n_k> of each decomposition, so the
    value is sum p + sum q - 2 Re Tr(M V_b V_a^dagger).

    Raises:
        NotUnitary: V_a or V_b is not a unitary of the decomposition rank
        RankMismatch: ranks differ
    """
    if a.rank != b.rank:
        raise RankMismatch(f"decompositions have ranks {a.rank} and {b.rank}")
    V_a = _check_rotation(V_a, a.rank, 'V_a', tol)
    V_b = _check_rotation(V_b, b.rank, 'V_b', tol)
    diff = _weighted_vectors(a) @ V_a - _weighted_vectors(b) @ V_b
    return float(np.sum(np.abs(diff) ** 2))


def optimal_decomposition_unitary(a, b, V_a=None):
    """
    V_b minimizing decomposition_distance_general for a fixed V_a.

    With M = |M| U the minimum sits at U V_b V_a^dagger = I, so V_b = U^dagger V_a.
    """
    V_a = np.eye(a.rank, dtype=np.complex128) if V_a is None else as_matrix(V_a)
    _, U = polar_unitary(overlap_matrix(a, b).entries)
    return U.conj().T @ V_a
