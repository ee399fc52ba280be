"""
State-vector simulation of a Mach-Zehnder interferometer probing the line element.

The amplitude tensor has axes (beam, internal, ancilla). A mixed internal state
rho = sum_k p_k |n_k><n_k| enters as its minimal purification
sum_k sqrt(p_k) |n_k> (x) |a_k>, so the unitary and the nonunitary (purified)
schemes share one simulator. Beam 0 carries U(dt) (or W(dt)), beam 1 the
reference V = sum_k e^{i f_k} |n_k><n_k|.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from geometry_errors import InvalidStep, VanishingOverlap
from hermitian_core import as_matrix, unitary_exp
from settings import DEFAULT_DEGENERACY_TOL, DEFAULT_RANK_TOL, DEFAULT_TOL
from state_space import DensityOperator, decompose

SQRT_HALF = np.sqrt(0.5)
VANISHING_OVERLAP = 1e-12


@dataclass(frozen=True, eq=False)
class InterferometerState:
    """Amplitudes indexed [beam, internal, ancilla]; unit norm."""
    amplitudes: np.ndarray

    @classmethod
    def purified(cls, decomp, beam=0):
        """|beam> (x) sum_k sqrt(p_k) |n_k> (x) |a_k> with ancilla dimension = rank."""
        amplitudes = np.zeros((2, decomp.dim, decomp.rank), dtype=np.complex128)
        amplitudes[beam] = decomp.vectors * np.sqrt(decomp.probs)
        return cls(amplitudes / np.linalg.norm(amplitudes))

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def beam_probability(self, beam):
        return float(np.sum(np.abs(self.amplitudes[beam]) ** 2))


class InterferenceOutcome(NamedTuple):
    p0: float
    p1: float
    p0_closed_form: float


class MaximizedInterference(NamedTuple):
    p0_max: float
    fstar: np.ndarray


@dataclass(frozen=True, eq=False)
class NonunitaryStep:
    """Probability increments delta_p with internal unitary U (beam 0) and phases f (beam 1)."""
    delta_p: np.ndarray
    U: np.ndarray
    phases: np.ndarray = None

    def __post_init__(self):
        delta_p = np.asarray(self.delta_p, dtype=float)
        phases = np.zeros_like(delta_p) if self.phases is None else np.asarray(self.phases, dtype=float)
        if phases.shape != delta_p.shape:
            raise InvalidStep("one phase per probability increment is required")
        object.__setattr__(self, 'delta_p', delta_p)
        object.__setattr__(self, 'U', as_matrix(self.U))
        object.__setattr__(self, 'phases', phases)

    def validate(self, decomp, tol=DEFAULT_TOL):
        """Check the step against the decomposition it acts on."""
        if self.delta_p.shape != decomp.probs.shape:
            raise InvalidStep(f"{self.delta_p.size} increments for rank {decomp.rank}")
        if self.U.shape[0] != decomp.dim:
            raise InvalidStep(f"internal unitary has dimension {self.U.shape[0]}, state has {decomp.dim}")
        if abs(np.sum(self.delta_p)) > tol:
            raise InvalidStep(f"increments sum to {np.sum(self.delta_p):.3e}, expected 0")
        updated = decomp.probs + self.delta_p
        if np.any(updated < -tol) or np.any(updated > 1 + tol):
            raise InvalidStep("p_k + delta_p_k leaves [0, 1]")
        if abs(np.sum(updated) + decomp.discarded - 1.0) > tol:
            raise InvalidStep("updated probabilities are not normalized")


def beam_splitter(state, inverse=False):
    """
    50-50 splitter on the beam index: |x> -> [|x> + (-1)^x |x+1>] / sqrt(2).

    With inverse=True the reversed splitter is applied; a splitter followed
    by its reverse is the identity, which is how the output splitter is
    oriented so that equal arms exit in beam 0.
    """
    a0, a1 = state.amplitudes
    if inverse:
        out = np.stack([a0 + a1, a1 - a0])
    else:
        out = np.stack([a0 - a1, a0 + a1])
    return InterferometerState(SQRT_HALF * out)


def reference_unitary(decomp, phases):
    """V = sum_k e^{i f_k} |n_k><n_k|, which commutes with rho."""
    vectors = decomp.vectors
    V = (vectors * np.exp(1j * np.asarray(phases, dtype=float))) @ vectors.conj().T
    # Directions outside the support are left untouched
    return V + np.eye(decomp.dim) - vectors @ vectors.conj().T


def apply_arms(state, beam0_map, V):
    """Apply beam0_map to the beam-0 amplitude block and V to the beam-1 internal index."""
    a0, a1 = state.amplitudes
    return InterferometerState(np.stack([beam0_map(a0), V @ a1]))


def _nonunitary_map(decomp, step):
    # W(dt) acts on the purified state only: branch k is rescaled to
    # sqrt(p_k + dp_k) and rotated by U.
    scale = np.sqrt(np.clip(decomp.probs + step.delta_p, 0.0, None) / decomp.probs)
    return lambda block: step.U @ (block * scale)


def reduced_beam_state(state, beam):
    """Normalized internal state of one beam, tracing out the ancilla."""
    block = state.amplitudes[beam]
    weight = np.sum(np.abs(block) ** 2)
    return (block @ block.conj().T) / weight


def _decompose(rho, rank_tol, degeneracy_tol):
    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    return decompose(rho, rank_tol, degeneracy_tol)


def unitary_p0_closed_form(decomp, U, phases):
    """P0 = 1/2 + 1/2 Re sum_k p_k <n_k|U|n_k> e^{-i f_k}."""
    returns = np.einsum('ik,ik->k', decomp.vectors.conj(), U @ decomp.vectors)
    return float(0.5 + 0.5 * np.real(np.sum(decomp.probs * returns * np.exp(-1j * np.asarray(phases)))))


def purified_p0_closed_form(decomp, step):
    """P0 = 1/2 + 1/2 Re sum_k sqrt(p_k (p_k + dp_k)) <n_k|U|n_k> e^{-i f_k}."""
    returns = np.einsum('ik,ik->k', decomp.vectors.conj(), step.U @ decomp.vectors)
    weights = np.sqrt(decomp.probs * np.clip(decomp.probs + step.delta_p, 0.0, None))
    return float(0.5 + 0.5 * np.real(np.sum(weights * returns * np.exp(-1j * step.phases))))


def simulate(decomp, beam0_map, phases):
    """Splitter, arms, reversed splitter; returns the output state."""
    state = InterferometerState.purified(decomp)
    state = beam_splitter(state)
    state = apply_arms(state, beam0_map, reference_unitary(decomp, phases))
    return beam_splitter(state, inverse=True)


def run_unitary(rho, H, delta_t, phases, rank_tol=DEFAULT_RANK_TOL,
                degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """
    Output probabilities of the unitary scheme.

    Returns:
        InterferenceOutcome(p0, p1) from the tensor simulation, plus the
        closed-form P0 for comparison
    """
    decomp = _decompose(rho, rank_tol, degeneracy_tol)
    U = unitary_exp(H, delta_t)
    phases = np.asarray(phases, dtype=float)
    if phases.shape != decomp.probs.shape:
        raise InvalidStep(f"{phases.size} phases for rank {decomp.rank}")
    out = simulate(decomp, lambda block: U @ block, phases)
    return InterferenceOutcome(
        p0=out.beam_probability(0),
        p1=out.beam_probability(1),
        p0_closed_form=unitary_p0_closed_form(decomp, U, phases),
    )


def _maximizing_phases(decomp, U):
    returns = np.einsum('ik,ik->k', decomp.vectors.conj(), U @ decomp.vectors)
    if np.min(np.abs(returns)) < VANISHING_OVERLAP:
        k = int(np.argmin(np.abs(returns)))
        raise VanishingOverlap(f"<n_{k}|U|n_{k}> vanishes; the maximizing phase is undefined")
    return np.mod(np.angle(returns), 2 * np.pi), np.abs(returns)


def maximize_P0(rho, H, delta_t, rank_tol=DEFAULT_RANK_TOL, degeneracy_tol=DEFAULT_DEGENERACY_TOL):
    """
    Maximize P0 over the reference phases, one branch at a time.

    f*_k = arg <n_k|U|n_k>, giving P0max = 1/2 + 1/2 sum_k p_k |<n_k|U|n_k>|.
    """
    decomp = _decompose(rho, rank_tol, degeneracy_tol)
    U = unitary_exp(H, delta_t)
    fstar, magnitudes = _maximizing_phases(decomp, U)
    return MaximizedInterference(float(0.5 + 0.5 * np.sum(decomp.probs * magnitudes)), fstar)


def run_purified(decomp, step, tol=DEFAULT_TOL):
    """
    Output of the purified (nonunitary) scheme.

    Returns:
        (P0, output state); the output state has unit norm
    """
    step.validate(decomp, tol)
    out = simulate(decomp, _nonunitary_map(decomp, step), step.phases)
    return out.beam_probability(0), out


def maximize_purified_P0(decomp, delta_p, U, tol=DEFAULT_TOL):
    """Per-branch phase maximization under purification; returns (P0, fstar)."""
    fstar, _ = _maximizing_phases(decomp, as_matrix(U))
    step = NonunitaryStep(delta_p=delta_p, U=U, phases=fstar)
    p0, _ = run_purified(decomp, step, tol)
    return MaximizedInterference(p0, fstar)


def arm_states(decomp, step, tol=DEFAULT_TOL):
    """State between the splitters (after the arms act), for inspecting each beam."""
    step.validate(decomp, tol)
    state = beam_splitter(InterferometerState.purified(decomp))
    return apply_arms(state, _nonunitary_map(decomp, step), reference_unitary(decomp, step.phases))
