"""
Thermal states of magnetic spin models and their spectral-metric coefficients.

For H(b) = H0 + b Sz and rho = exp(-beta H(b)) / Z with eigenpairs (e_m, |m>):

    ds^2 = C_V / (4 beta^2) dbeta^2                                   (fixed b)
    ds^2 = (beta chi_M / 4 + sum_m p_m chi_F,m) db^2                  (fixed beta)

    C_V     = beta^2 (<e^2> - <e>^2)
    chi_M   = beta (<(de/db)^2> - <de/db>^2),   de_m/db = <m|Sz|m>
    chi_F,m = sum_{m' != m} |<m'|Sz|m>|^2 / (e_m - e_m')^2
"""

from dataclasses import dataclass, replace
from functools import reduce
from typing import NamedTuple

import numpy as np

from geometry_errors import DegenerateSpectrum, DimensionTooLarge, DomainError, NotHermitian
from hermitian_core import HermitianEigen, as_matrix, eig_hermitian, is_hermitian
from settings import DEFAULT_DEGENERACY_TOL, DEFAULT_FD_STEP, DEFAULT_RANK_TOL, DEFAULT_TOL
from spectral_metric import differential_line_element
from state_space import DensityOperator, sample_path

MAX_SITES = 6

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class MagneticModel:
    """H(b) = H0 + b Sz."""
    H0: np.ndarray
    Sz: np.ndarray
    b: float = 0.0
    n_sites: int = 1

    def __post_init__(self):
        H0, Sz = as_matrix(self.H0), as_matrix(self.Sz)
        if H0.shape != Sz.shape:
            raise DomainError(f"H0 has shape {H0.shape}, Sz has shape {Sz.shape}")
        if not is_hermitian(H0, DEFAULT_TOL) or not is_hermitian(Sz, DEFAULT_TOL):
            raise NotHermitian("H0 and Sz must be Hermitian")
        object.__setattr__(self, 'H0', H0)
        object.__setattr__(self, 'Sz', Sz)

    @property
    def dim(self):
        return self.H0.shape[0]

    def hamiltonian(self, b=None):
        field = self.b if b is None else b
        return self.H0 + field * self.Sz

    def with_field(self, b):
        return replace(self, b=float(b))


@dataclass(frozen=True, eq=False)
class ThermalState:
    """Boltzmann weights of H(b) at inverse temperature beta."""
    beta: float
    eigen: HermitianEigen
    log_Z: float
    weights: np.ndarray

    @property
    def Z(self):
        return float(np.exp(self.log_Z))

    @property
    def energies(self):
        return self.eigen.values

    def mean(self, values):
        return float(np.sum(self.weights * values))

    def variance(self, values):
        centered = values - self.mean(values)
        return float(np.sum(self.weights * centered ** 2))

    def density(self):
        matrix = (self.eigen.vectors * self.weights) @ self.eigen.vectors.conj().T
        return DensityOperator(matrix)


class Susceptibilities(NamedTuple):
    chi_M: float
    chi_F: np.ndarray


def _site_operator(op, site, n):
    factors = [op if i == site else np.eye(2) for i in range(n)]
    return reduce(np.kron, factors)


def build_heisenberg_chain(n, J=1.0, transverse=0.0, b=0.0):
    """
    Open Heisenberg chain sum_i J sigma_i . sigma_{i+1} / 4 with Sz = sum_i sigma_z^(i) / 2.

    Args:
        n: number of sites, 2 to 6
        J: exchange coupling
        transverse: g of an extra g sum_i sigma_x^(i) term in H0, which
            breaks [H0, Sz] = 0
        b: initial field value
    """
    if n < 2:
        raise DomainError(f"a chain needs at least two sites, got {n}")
    if n > MAX_SITES:
        raise DimensionTooLarge(f"{n} sites gives dimension {2 ** n}, above {2 ** MAX_SITES}")
    dim = 2 ** n
    H0 = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(n - 1):
        for pauli in (PAULI_X, PAULI_Y, PAULI_Z):
            H0 += 0.25 * J * _site_operator(pauli, i, n) @ _site_operator(pauli, i + 1, n)
    Sz = sum(0.5 * _site_operator(PAULI_Z, i, n) for i in range(n))
    if transverse:
        H0 += transverse * sum(_site_operator(PAULI_X, i, n) for i in range(n))
    return MagneticModel(H0=H0, Sz=Sz, b=float(b), n_sites=n)


def single_spin_model(b=0.0):
    """A lone spin-1/2 in a field: H0 = 0, Sz = sigma_z / 2."""
    return MagneticModel(H0=np.zeros((2, 2)), Sz=0.5 * PAULI_Z, b=float(b), n_sites=1)


def _check_beta(beta):
    if not beta > 0:
        raise DomainError(f"beta={beta!r} must be positive")


def thermal_state(model, beta, tol=DEFAULT_TOL):
    """Boltzmann state; log Z is accumulated with the ground energy shifted out."""
    _check_beta(beta)
    eigen = eig_hermitian(model.hamiltonian(), tol)
    ground = eigen.values[0]
    boltzmann = np.exp(-beta * (eigen.values - ground))
    total = np.sum(boltzmann)
    return ThermalState(
        beta=float(beta),
        eigen=eigen,
        log_Z=float(np.log(total) - beta * ground),
        weights=boltzmann / total,
    )


def specific_heat(model, beta):
    state = thermal_state(model, beta)
    return float(beta ** 2 * state.variance(state.energies))


def metric_dbeta(model, beta):
    """Coefficient of dbeta^2: C_V / (4 beta^2)."""
    return specific_heat(model, beta) / (4.0 * beta ** 2)


def _require_nondegenerate(values, degeneracy_tol):
    gaps = np.diff(values)
    if gaps.size and np.min(gaps) < degeneracy_tol:
        m = int(np.argmin(gaps))
        raise DegenerateSpectrum(
            f"energies {values[m]:.12g} and {values[m + 1]:.12g} are degenerate; "
            "the fidelity susceptibility is undefined"
        )


def susceptibilities(model, beta, degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """
    Magnetic and per-level fidelity susceptibilities at the model's field.

    Raises:
        DegenerateSpectrum: two energies of H(b) are closer than degeneracy_tol
    """
    state = thermal_state(model, beta)
    energies = state.energies
    _require_nondegenerate(energies, degeneracy_tol)

    vectors = state.eigen.vectors
    Sz_energy = vectors.conj().T @ model.Sz @ vectors
    slopes = np.real(np.diag(Sz_energy))
    chi_M = float(beta * state.variance(slopes))

    gaps = energies[:, None] - energies[None, :]
    np.fill_diagonal(gaps, np.inf)
    chi_F = np.sum(np.abs(Sz_energy) ** 2 / gaps ** 2, axis=0)
    return Susceptibilities(chi_M=max(chi_M, 0.0), chi_F=chi_F)


def metric_db(model, beta, degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """Coefficient of db^2: beta chi_M / 4 + sum_m p_m chi_F,m."""
    state = thermal_state(model, beta)
    chi = susceptibilities(model, beta, degeneracy_tol)
    return float(beta * chi.chi_M / 4.0 + np.sum(state.weights * chi.chi_F))


def beta_family(model):
    """beta -> thermal density operator at the model's field."""
    return lambda beta: thermal_state(model, beta).density()


def field_family(model, beta):
    """b -> thermal density operator at fixed beta."""
    return lambda b: thermal_state(model.with_field(b), beta).density()


def _central_breakdown(family, center, step, rank_tol, degeneracy_tol):
    grid = np.array([center - step, center, center + step])
    path = sample_path(family, grid, rank_tol, degeneracy_tol)
    return path, differential_line_element(path, 1)


def metric_dbeta_fd(model, beta, step=DEFAULT_FD_STEP, rank_tol=DEFAULT_RANK_TOL,
                    degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """dbeta^2 coefficient from central differences of the spectral decomposition."""
    _check_beta(beta - step)
    _, breakdown = _central_breakdown(beta_family(model), beta, step, rank_tol, degeneracy_tol)
    return breakdown.total / step ** 2


def metric_db_fd(model, beta, step=DEFAULT_FD_STEP, rank_tol=DEFAULT_RANK_TOL,
                 degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """
    db^2 coefficient from central differences, split by origin.

    Returns:
        (total, fubini_study, fisher_rao), each divided by step^2
    """
    _check_beta(beta)
    _, breakdown = _central_breakdown(field_family(model, beta), model.b, step, rank_tol, degeneracy_tol)
    scale = step ** 2
    return breakdown.total / scale, breakdown.fubini_study / scale, breakdown.fisher_rao / scale


def fidelity_susceptibility_fd(model, beta, step=DEFAULT_FD_STEP, rank_tol=DEFAULT_RANK_TOL,
                               degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """
    Per-level ||d|m>/db||^2 - |<m|d|m>/db>|^2 from aligned eigenvectors.

    Levels come out in ascending energy (descending weight); levels whose
    weight falls below rank_tol are not resolved.
    """
    _check_beta(beta)
    path, breakdown = _central_breakdown(field_family(model, beta), model.b, step, rank_tol, degeneracy_tol)
    return breakdown.fubini_study_terms / (path.decomps[1].probs * step ** 2)
