"""
Density operators, their spectral decompositions and aligned paths.

A path t -> rho(t) is sampled on a grid, each point is decomposed into
(p_k, |n_k>, f_k) with p_k descending, and consecutive decompositions are
matched branch by branch and re-phased so every overlap <n_k(t_i)|n_k(t_i+1)>
is real and non-negative (the discrete parallel-transport gauge).
"""

from dataclasses import dataclass, field, replace

import numpy as np

from geometry_errors import (
    AmbiguousMatching,
    GeometryError,
    InvalidGrid,
    InvalidState,
    DegenerateSpectrum,
    RankChange,
    RankMismatch,
)
from hermitian_core import as_matrix, eig_hermitian, is_hermitian
from settings import DEFAULT_AMBIGUITY_TOL, DEFAULT_DEGENERACY_TOL, DEFAULT_RANK_TOL, DEFAULT_TOL


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A Hermitian, unit-trace, positive semidefinite matrix."""
    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        M = as_matrix(self.matrix)
        if not is_hermitian(M, self.tol):
            raise InvalidState("density operator is not Hermitian")
        M = 0.5 * (M + M.conj().T)
        trace = np.trace(M).real
        if abs(trace - 1.0) > self.tol:
            raise InvalidState(f"density operator has trace {trace:.12g}, expected 1")
        lowest = np.linalg.eigvalsh(M)[0]
        if lowest < -self.tol:
            raise InvalidState(f"density operator has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, 'matrix', M)

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """
    Kept spectrum of a density operator.

    probs[k], vectors[:, k] and phases[k] describe branch k. discarded is the
    eigenvalue mass dropped below rank_tol.
    """
    probs: np.ndarray
    vectors: np.ndarray
    phases: np.ndarray = None
    discarded: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        vectors = np.asarray(self.vectors, dtype=np.complex128)
        if vectors.ndim != 2 or vectors.shape[1] != probs.shape[0]:
            raise InvalidState(
                f"{probs.shape[0]} probabilities do not match vectors of shape {vectors.shape}"
            )
        phases = np.zeros(probs.shape[0]) if self.phases is None else np.asarray(self.phases, dtype=float)
        if phases.shape != probs.shape:
            raise InvalidState("one gauge phase per branch is required")
        object.__setattr__(self, 'probs', probs)
        object.__setattr__(self, 'vectors', vectors)
        object.__setattr__(self, 'phases', np.mod(phases, 2 * np.pi))

    @property
    def rank(self):
        return self.probs.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[0]

    def amplitudes(self):
        """Columns sqrt(p_k) e^{i f_k} |n_k>."""
        return self.vectors * (np.sqrt(self.probs) * np.exp(1j * self.phases))

    def reconstruct(self):
        return (self.vectors * self.probs) @ self.vectors.conj().T

    def density(self):
        return DensityOperator(self.reconstruct(), tol=max(DEFAULT_TOL, 10 * abs(self.discarded)))

    def with_phases(self, phases):
        return replace(self, phases=np.asarray(phases, dtype=float))

    def with_vectors(self, vectors):
        return replace(self, vectors=vectors)


@dataclass(eq=False)
class AlignedPath:
    """Time-ordered decompositions in the discrete parallel-transport gauge."""
    times: np.ndarray
    decomps: list = field(default_factory=list)

    def __len__(self):
        return len(self.decomps)

    @property
    def rank(self):
        return self.decomps[0].rank

    def step(self, i):
        """Forward grid step t_{i+1} - t_i."""
        return float(self.times[i + 1] - self.times[i])


def decompose(rho, rank_tol=DEFAULT_RANK_TOL, degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """
    Spectral decomposition of a density operator.

    Args:
        rho: DensityOperator (a raw matrix is validated first)
        rank_tol: eigenvalues at or below this are discarded
        degeneracy_tol: kept eigenvalues closer than this raise DegenerateSpectrum

    Returns:
        SpectralDecomposition with probabilities descending and phases zero
    """
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    eigen = eig_hermitian(rho.matrix, rho.tol)
    values = eigen.values[::-1]
    vectors = eigen.vectors[:, ::-1]

    keep = values > rank_tol
    if not np.any(keep):
        raise InvalidState("density operator has no eigenvalue above rank_tol")
    probs = values[keep]
    gaps = -np.diff(probs)
    if gaps.size and np.min(gaps) < degeneracy_tol:
        k = int(np.argmin(gaps))
        raise DegenerateSpectrum(
            f"eigenvalues {probs[k]:.12g} and {probs[k + 1]:.12g} are closer than "
            f"degeneracy_tol={degeneracy_tol:g}"
        )
    return SpectralDecomposition(
        probs=probs,
        vectors=vectors[:, keep],
        discarded=float(np.sum(values[~keep])),
    )


def _greedy_matching(magnitudes):
    # Pairs claimed in descending |overlap| order; each side used once.
    n = magnitudes.shape[0]
    order = np.argsort(-magnitudes, axis=None, kind='stable')
    perm = np.full(n, -1)
    taken = np.zeros(n, dtype=bool)
    for flat in order:
        k, l = divmod(int(flat), n)
        if perm[k] < 0 and not taken[l]:
            perm[k] = l
            taken[l] = True
    return perm


def align_step(prev, next, ambiguity_tol=DEFAULT_AMBIGUITY_TOL):
    """
    Match the branches of `next` to those of `prev` and fix their gauge.

    Branches are matched greedily by descending |<n_k(prev)|n_l(next)>|, then
    each matched vector is re-phased so its overlap with prev is real and
    non-negative. Stored phases f_k travel with their branch.

    Raises:
        RankMismatch: ranks differ
        AmbiguousMatching: best and second-best |overlap| of a branch are
            within ambiguity_tol (an eigenvalue crossing)
    """
    if prev.rank != next.rank:
        raise RankMismatch(f"cannot align rank {next.rank} against rank {prev.rank}")
    overlaps = prev.vectors.conj().T @ next.vectors
    magnitudes = np.abs(overlaps)

    if next.rank > 1:
        ranked = np.sort(magnitudes, axis=1)
        margins = ranked[:, -1] - ranked[:, -2]
        if np.min(margins) < ambiguity_tol:
            k = int(np.argmin(margins))
            raise AmbiguousMatching(
                f"branch {k} has two candidate matches with |overlap| "
                f"{ranked[k, -1]:.9f} and {ranked[k, -2]:.9f}"
            )

    perm = _greedy_matching(magnitudes)
    vectors = next.vectors[:, perm]
    matched = overlaps[np.arange(next.rank), perm]
    vectors = vectors * np.exp(-1j * np.angle(matched))
    return SpectralDecomposition(
        probs=next.probs[perm],
        vectors=vectors,
        phases=next.phases[perm],
        discarded=next.discarded,
    )


def _check_grid(grid):
    times = np.asarray(grid, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise InvalidGrid("a path needs a one-dimensional grid with at least two points")
    if np.any(np.diff(times) <= 0):
        raise InvalidGrid("grid must be strictly increasing")
    return times


def sample_path(family, grid, rank_tol=DEFAULT_RANK_TOL, degeneracy_tol=DEFAULT_DEGENERACY_TOL,
                ambiguity_tol=DEFAULT_AMBIGUITY_TOL):
    """
    Sample a density-operator family on a grid and align it.

    Args:
        family: callable t -> DensityOperator (or raw matrix)
        grid: strictly increasing parameter values

    Returns:
        AlignedPath with constant rank and positive consecutive overlaps

    Raises:
        RankChange if the kept rank differs between grid points; decompose and
        align_step errors are re-raised tagged with the offending t
    """
    times = _check_grid(grid)
    decomps = []
    for t in times:
        try:
            decomps.append(decompose(family(t), rank_tol, degeneracy_tol))
        except GeometryError as e:
            raise e.at(float(t)) from e

    rank = decomps[0].rank
    for t, decomp in zip(times, decomps):
        if decomp.rank != rank:
            raise RankChange(f"rank changes from {rank} to {decomp.rank} (at t={float(t)!r})", t=float(t))

    aligned = [decomps[0]]
    for t, decomp in zip(times[1:], decomps[1:]):
        try:
            aligned.append(align_step(aligned[-1], decomp, ambiguity_tol))
        except GeometryError as e:
            raise e.at(float(t)) from e
    return AlignedPath(times=times, decomps=aligned)


def consecutive_overlaps(path):
    """Array (M, N) of <n_k(t_i)|n_k(t_{i+1})> along the path."""
    return np.array([
        np.einsum('ik,ik->k', a.vectors.conj(), b.vectors)
        for a, b in zip(path.decomps[:-1], path.decomps[1:])
    ])
