"""
Distance between nearby spectral decompositions and the induced line element.

For decompositions a = {sqrt(p_k) e^{i f_k} |n_k>} and b = {sqrt(q_k) e^{i g_k} |m_k>}
with matched branch order:

    distance^2     = sum_k || sqrt(p_k) e^{i f_k} |n_k> - sqrt(q_k) e^{i g_k} |m_k> ||^2
    line element^2 = min over phases = sum_k (p_k + q_k) - 2 sum_k sqrt(p_k q_k) |<n_k|m_k>|

and to second order in dt the line element splits into a p-weighted
Fubini-Study part plus the Fisher-Rao term 1/4 sum_k dp_k^2 / p_k.
"""

from dataclasses import dataclass

import numpy as np

from geometry_errors import IndexOutOfRange, RankMismatch


@dataclass(frozen=True, eq=False)
class LineElementBreakdown:
    """Squared line element of one path step, split by origin."""
    fubini_study_terms: np.ndarray
    fisher_rao: float

    @property
    def fubini_study(self):
        return float(np.sum(self.fubini_study_terms))

    @property
    def total(self):
        return self.fubini_study + self.fisher_rao


def _require_same_rank(a, b):
    if a.rank != b.rank:
        raise RankMismatch(f"decompositions have ranks {a.rank} and {b.rank}")


def branch_overlaps(a, b):
    """<n_k|m_k> for each matched branch k."""
    _require_same_rank(a, b)
    return np.einsum('ik,ik->k', a.vectors.conj(), b.vectors)


def decomposition_distance_sq(a, b):
    """Squared distance between two decompositions at their stored phases."""
    _require_same_rank(a, b)
    diff = a.amplitudes() - b.amplitudes()
    return float(np.sum(np.abs(diff) ** 2))


def line_element_sq(a, b):
    """Phase-minimized squared distance; independent of the stored phases."""
    overlaps = np.abs(branch_overlaps(a, b))
    value = np.sum(a.probs + b.probs) - 2.0 * np.sum(np.sqrt(a.probs * b.probs) * overlaps)
    return float(max(value, 0.0))


def _check_interior(path, i):
    last = len(path) - 1
    if not 0 < i < last:
        raise IndexOutOfRange(f"index {i} is not an interior point of a path with {last + 1} points")


def differential_line_element(path, i):
    """
    Differential line element at interior grid point i.

    Derivatives are central differences of the aligned vectors and of the
    probabilities; the squared element is scaled by the forward step
    dt = t_{i+1} - t_i so it is comparable with line_element_sq(i, i+1).

    Returns:
        LineElementBreakdown with p_k ds_k^2 per branch and the Fisher-Rao term
    """
    _check_interior(path, i)
    before, here, after = path.decomps[i - 1], path.decomps[i], path.decomps[i + 1]
    span = float(path.times[i + 1] - path.times[i - 1])
    dt = path.step(i)

    n_dot = (after.vectors - before.vectors) / span
    norms = np.sum(np.abs(n_dot) ** 2, axis=0)
    along = np.einsum('ik,ik->k', here.vectors.conj(), n_dot)
    ds_k_sq = np.clip(norms - np.abs(along) ** 2, 0.0, None) * dt ** 2

    dp = (after.probs - before.probs) / span * dt
    fisher_rao = 0.25 * float(np.sum(dp ** 2 / here.probs))

    return LineElementBreakdown(
        fubini_study_terms=here.probs * ds_k_sq,
        fisher_rao=fisher_rao,
    )


def path_length(path):
    """Sum of step chords sqrt(line_element_sq) along the path."""
    return float(sum(
        np.sqrt(line_element_sq(a, b))
        for a, b in zip(path.decomps[:-1], path.decomps[1:])
    ))


def check_connection(path, i):
    """
    Residual max_k |f_k' - i <n_k|n_k'>| at grid point i.

    Both derivatives are forward difference quotients over t_i -> t_{i+1}, so
    a path in the discrete parallel-transport gauge leaves a residual of order
    dt, while a gauge violation leaves an order-one (or larger) residual.
    """
    _check_interior(path, i)
    here, after = path.decomps[i], path.decomps[i + 1]
    dt = path.step(i)
    inner = (branch_overlaps(here, after) - 1.0) / dt
    f_dot = np.angle(np.exp(1j * (after.phases - here.phases))) / dt
    return float(np.max(np.abs(f_dot - 1j * inner)))
