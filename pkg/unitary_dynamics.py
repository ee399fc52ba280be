"""
Unitary evolution of mixed states and the energy dispersions that set the
speed of the spectral decomposition.

    avg dispersion  = sum_k p_k (Delta_k E)^2       (per-eigenvector variances)
    rho dispersion  = Tr(rho H^2) - Tr(rho H)^2
    avg <= rho, and ds/dt = sqrt(avg dispersion)    (hbar = 1)
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from hermitian_core import as_matrix, eig_hermitian, unitary_exp
from settings import DEFAULT_DEGENERACY_TOL, DEFAULT_RANK_TOL, DEFAULT_TOL
from spectral_metric import differential_line_element, path_length
from state_space import DensityOperator, decompose


@dataclass(frozen=True, eq=False)
class DispersionReport:
    per_branch: np.ndarray
    probs: np.ndarray
    rho_dispersion_sq: float

    @property
    def avg_dispersion_sq(self):
        return float(np.sum(self.probs * self.per_branch))


class UncertaintyReport(NamedTuple):
    lhs_rho: float
    lhs_avg: float
    path_len: float


class GeometricPhase(NamedTuple):
    phase: float
    visibility: float


def evolve(rho0, H, t, tol=DEFAULT_TOL):
    """U(t) rho0 U(t)^dagger with U(t) = exp(-i H t)."""
    if not isinstance(rho0, DensityOperator):
        rho0 = DensityOperator(rho0, tol)
    U = unitary_exp(H, t, tol)
    return DensityOperator(U @ rho0.matrix @ U.conj().T, rho0.tol)


def branch_dispersions(decomp, H):
    """Energy variance <n_k|H^2|n_k> - <n_k|H|n_k>^2 of every kept eigenvector."""
    H = as_matrix(H)
    applied = H @ decomp.vectors
    means = np.einsum('ik,ik->k', decomp.vectors.conj(), applied).real
    residuals = applied - decomp.vectors * means
    return np.sum(np.abs(residuals) ** 2, axis=0)


def rho_dispersion(rho_matrix, H):
    """Tr(rho H~^2) with H~ = H - Tr(rho H), which is shift invariant."""
    H = as_matrix(H)
    mean = np.trace(rho_matrix @ H).real
    shifted = H - mean * np.eye(H.shape[0])
    return float(max(np.trace(rho_matrix @ shifted @ shifted).real, 0.0))


def dispersions(rho, H, rank_tol=DEFAULT_RANK_TOL, degeneracy_tol=DEFAULT_DEGENERACY_TOL,
                tol=DEFAULT_TOL):
    """
    Averaged and standard energy dispersions of rho under H.

    Raises:
        DegenerateSpectrum: rho's kept spectrum is degenerate
        NotHermitian: H is not Hermitian
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho, tol)
    eig_hermitian(H, tol)
    decomp = decompose(rho, rank_tol, degeneracy_tol)
    return DispersionReport(
        per_branch=branch_dispersions(decomp, H),
        probs=decomp.probs,
        rho_dispersion_sq=rho_dispersion(rho.matrix, H),
    )


def speed(path, i, H):
    """
    Metric speed of the decomposition at grid point i against sqrt(avg dispersion).

    Returns:
        (metric_speed, dispersion_speed)
    """
    breakdown = differential_line_element(path, i)
    metric_speed = np.sqrt(breakdown.total) / path.step(i)
    decomp = path.decomps[i]
    dispersion_speed = np.sqrt(np.sum(decomp.probs * branch_dispersions(decomp, H)))
    return float(metric_speed), float(dispersion_speed)


def uncertainty_check(path, H):
    """
    Time-energy uncertainty chain along an evolved path.

    Time averages are left-endpoint Riemann sums over the grid, so
    lhs_rho = <Delta_rho E> Delta t and lhs_avg = <avg Delta E> Delta t.
    lhs_avg equals the path length up to discretization error.
    """
    lhs_rho = 0.0
    lhs_avg = 0.0
    for i in range(len(path) - 1):
        decomp = path.decomps[i]
        dt = path.step(i)
        lhs_avg += np.sqrt(np.sum(decomp.probs * branch_dispersions(decomp, H))) * dt
        lhs_rho += np.sqrt(rho_dispersion(decomp.reconstruct(), H)) * dt
    return UncertaintyReport(float(lhs_rho), float(lhs_avg), path_length(path))


def mixed_geometric_phase(path):
    """
    Mixed-state geometric phase accumulated along an aligned path.

    In the discrete parallel-transport gauge the dynamical phase has been
    removed step by step, so arg sum_k p_k <n_k(t_0)|n_k(t_M)> is the phase
    and its modulus the interference visibility.
    """
    start, end = path.decomps[0], path.decomps[-1]
    overlaps = np.einsum('ik,ik->k', start.vectors.conj(), end.vectors)
    total = np.sum(start.probs * overlaps)
    return GeometricPhase(float(np.angle(total)), float(np.abs(total)))


def mixed_geometric_phase_closed_form(rho0, H, t, rank_tol=DEFAULT_RANK_TOL,
                                      degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """arg sum_k p_k <n_k|U(t)|n_k> e^{i t <n_k|H|n_k>} for time-independent H."""
    decomp = decompose(rho0, rank_tol, degeneracy_tol)
    H = as_matrix(H)
    U = unitary_exp(H, t)
    returns = np.einsum('ik,ik->k', decomp.vectors.conj(), U @ decomp.vectors)
    energies = np.einsum('ik,ik->k', decomp.vectors.conj(), H @ decomp.vectors).real
    total = np.sum(decomp.probs * returns * np.exp(1j * t * energies))
    return GeometricPhase(float(np.angle(total)), float(np.abs(total)))


def unitary_family(rho0, H, tol=DEFAULT_TOL):
    """t -> evolve(rho0, H, t), ready for sample_path."""
    if not isinstance(rho0, DensityOperator):
        rho0 = DensityOperator(rho0, tol)
    eigen = eig_hermitian(H, tol)

    def family(t):
        U = (eigen.vectors * np.exp(-1j * eigen.values * t)) @ eigen.vectors.conj().T
        return DensityOperator(U @ rho0.matrix @ U.conj().T, rho0.tol)

    return family
