"""
Geodesics of the spectral-decomposition metric on the nondegenerate qubit.

In the Bloch ball the line element is

    ds^2 = 1/4 (dr^2 / (1 - r^2) + dtheta^2 + sin^2(theta) dphi^2)

Geodesics lie in a plane through the origin. With u = arcsin r the in-plane
element becomes 1/4 (du^2 + dtheta^2), so geodesics are straight lines in
(u, theta):

    r_g(theta) = sin[u1 + (u2 - u1) theta / theta12]
    l_g        = 1/2 sqrt(theta12^2 + (u2 - u1)^2)
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy.linalg import solve_banded

from geometry_errors import ConvergenceFailure, DomainError
from random_states import qubit_density_from_bloch
from state_space import DensityOperator

FIGURE_R1 = (0.1, 0.4, 0.7, 1.0)
FIGURE_R2 = 0.05
FIGURE_THETA12 = (np.pi / 4, np.pi)
FIGURE_SAMPLES = 200

ANGLE_SLACK = 1e-12
GRADIENT_SLACK = 1e3
NEWTON_MAX_ITER = 500
NEWTON_STEP_TOL = 1e-13
NEWTON_MIN_DAMPING = 1e-10


def _check_radius(r, name='r'):
    if not 0.0 < r <= 1.0:
        raise DomainError(f"{name}={r!r} is outside (0, 1]")


@dataclass(frozen=True)
class BlochPoint:
    """Polar coordinates of a qubit state; p0 = (1 + r) / 2."""
    r: float
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        _check_radius(self.r)
        if not -ANGLE_SLACK <= self.theta <= np.pi + ANGLE_SLACK:
            raise DomainError(f"theta={self.theta!r} is outside [0, pi]")
        object.__setattr__(self, 'theta', float(np.clip(self.theta, 0.0, np.pi)))
        object.__setattr__(self, 'phi', float(np.mod(self.phi, 2 * np.pi)))

    @property
    def vector(self):
        return self.r * np.array([
            np.sin(self.theta) * np.cos(self.phi),
            np.sin(self.theta) * np.sin(self.phi),
            np.cos(self.theta),
        ])

    def to_density(self):
        return DensityOperator(qubit_density_from_bloch(self.vector))

    @classmethod
    def from_density(cls, rho):
        if not isinstance(rho, DensityOperator):
            rho = DensityOperator(rho)
        if rho.dim != 2:
            raise DomainError(f"Bloch coordinates need a qubit, got dimension {rho.dim}")
        M = rho.matrix
        x, y = 2 * M[1, 0].real, 2 * M[1, 0].imag
        z = (M[0, 0] - M[1, 1]).real
        r = float(np.sqrt(x * x + y * y + z * z))
        if r == 0.0:
            raise DomainError("the maximally mixed state has no polar angles")
        return cls(r=min(r, 1.0), theta=float(np.arccos(np.clip(z / r, -1.0, 1.0))),
                   phi=float(np.arctan2(y, x)))


@dataclass(frozen=True)
class GeodesicSpec:
    """Endpoints (r1, 0) and (r2, theta12) in a plane through the origin."""
    r1: float
    r2: float
    theta12: float

    def __post_init__(self):
        _check_radius(self.r1, 'r1')
        _check_radius(self.r2, 'r2')
        if not 0.0 < self.theta12 <= np.pi:
            raise DomainError(f"theta12={self.theta12!r} is outside (0, pi]")

    @property
    def u1(self):
        return float(np.arcsin(self.r1))

    @property
    def u2(self):
        return float(np.arcsin(self.r2))


class NumericGeodesic(NamedTuple):
    theta: np.ndarray
    r: np.ndarray
    length: float


def qubit_line_element_sq(point, dp):
    """
    Squared line element at a Bloch point.

    Args:
        point: BlochPoint
        dp: (dr, dtheta, dphi)
    """
    dr, dtheta, dphi = dp
    if point.r >= 1.0:
        if dr != 0.0:
            raise DomainError("on the pure-state boundary dr must vanish")
        radial = 0.0
    else:
        radial = dr * dr / (1.0 - point.r ** 2)
    return float(0.25 * (radial + dtheta ** 2 + np.sin(point.theta) ** 2 * dphi ** 2))


def geodesic_r(spec, theta):
    """Radius along the geodesic; accepts a scalar or an array of angles."""
    angles = np.asarray(theta, dtype=float)
    if np.any(angles < -ANGLE_SLACK) or np.any(angles > spec.theta12 + ANGLE_SLACK):
        raise DomainError(f"theta must lie in [0, {spec.theta12!r}]")
    fraction = np.clip(angles / spec.theta12, 0.0, 1.0)
    r = np.sin(spec.u1 + (spec.u2 - spec.u1) * fraction)
    # Pin the endpoints against arcsin/sin round-off
    r = np.where(fraction == 0.0, spec.r1, np.where(fraction == 1.0, spec.r2, r))
    return float(r) if r.ndim == 0 else r


def geodesic_length(spec):
    return float(0.5 * np.hypot(spec.theta12, spec.u2 - spec.u1))


def _plane_angle(a, b):
    cosine = np.dot(a.vector, b.vector) / (a.r * b.r)
    return float(np.arccos(np.clip(cosine, -1.0, 1.0)))


def geodesic_between(a, b):
    """GeodesicSpec joining two Bloch points, measured in the plane they span with the origin."""
    theta12 = _plane_angle(a, b)
    if theta12 == 0.0:
        raise DomainError("points on one ray are joined by a radial segment, not a polar geodesic")
    return GeodesicSpec(r1=a.r, r2=b.r, theta12=theta12)


def qubit_distance(a, b):
    """Geodesic distance between two Bloch points (radial segments included)."""
    theta12 = _plane_angle(a, b)
    return float(0.5 * np.hypot(theta12, np.arcsin(b.r) - np.arcsin(a.r)))


def geodesic_family(spec):
    """s in [0, 1] -> density operator on the geodesic, in the xz-plane."""
    def family(s):
        theta = spec.theta12 * s
        r = geodesic_r(spec, theta)
        return DensityOperator(qubit_density_from_bloch(r * np.array([np.sin(theta), 0.0, np.cos(theta)])))

    return family


def _half_chords(u_interior, u1, u2, h):
    u = np.concatenate(([u1], u_interior, [u2]))
    d = np.diff(u)
    return d, np.sqrt(h * h + d * d)


def numeric_geodesic(spec, n_points=401):
    """
    Minimize the discretized length over interior radii.

    The curve is sampled at n_points equally spaced angles; the length
    1/2 sum sqrt(h^2 + du^2) is convex in u = arcsin r, so it is minimized
    by damped Newton steps on the tridiagonal Hessian, starting from r
    linear in theta. A step is halved until it lowers the gradient norm;
    iteration ends when the Newton step is below round-off.

    Returns:
        NumericGeodesic(theta, r, length)

    Raises:
        ConvergenceFailure: Newton stalls with the gradient above its round-off floor
    """
    if n_points < 3:
        raise DomainError(f"n_points={n_points} is below 3")
    theta = np.linspace(0.0, spec.theta12, n_points)
    h = theta[1] - theta[0]
    u1, u2 = spec.u1, spec.u2

    def objective(u_inner):
        _, chords = _half_chords(u_inner, u1, u2, h)
        return 0.5 * np.sum(chords)

    def gradient(u_inner):
        d, chords = _half_chords(u_inner, u1, u2, h)
        slopes = d / chords
        return 0.5 * (slopes[:-1] - slopes[1:])

    def hessian_bands(u_inner):
        _, chords = _half_chords(u_inner, u1, u2, h)
        w = h * h / chords ** 3
        bands = np.zeros((3, len(u_inner)))
        bands[0, 1:] = -0.5 * w[1:-1]
        bands[1] = 0.5 * (w[:-1] + w[1:])
        bands[2, :-1] = -0.5 * w[1:-1]
        return bands

    # Slopes d/c carry absolute round-off of order eps * |u| / h
    grad_floor = GRADIENT_SLACK * np.finfo(float).eps * (1.0 + max(u1, u2)) / h

    u = np.arcsin(np.linspace(spec.r1, spec.r2, n_points)[1:-1])
    g = gradient(u)
    merit = float(np.linalg.norm(g))
    step_tol = NEWTON_STEP_TOL * (1.0 + max(u1, u2))
    converged = False
    for _ in range(NEWTON_MAX_ITER):
        step = solve_banded((1, 1), hessian_bands(u), -g)
        if np.max(np.abs(step)) <= step_tol:
            u = u + step
            converged = True
            break
        t = 1.0
        while t >= NEWTON_MIN_DAMPING:
            trial = u + t * step
            trial_g = gradient(trial)
            trial_merit = float(np.linalg.norm(trial_g))
            if trial_merit < merit:
                u, g, merit = trial, trial_g, trial_merit
                break
            t *= 0.5
        else:
            # Round-off stall
            break
    if not converged:
        grad_norm = float(np.max(np.abs(gradient(u))))
        if grad_norm > grad_floor:
            raise ConvergenceFailure(
                f"geodesic minimizer stalled at |grad|={grad_norm:.2e} (floor {grad_floor:.2e})")

    r = np.sin(np.concatenate(([u1], u, [u2])))
    r[0], r[-1] = spec.r1, spec.r2
    return NumericGeodesic(theta=theta, r=r, length=float(objective(u)))


def figure2_dataset(samples=FIGURE_SAMPLES):
    """
    In-plane geodesic curves r(theta) (sin theta, 0, cos theta) ending at r2 = 0.05.

    Returns:
        DataFrame with columns r1, theta12, theta, x, z; one block of
        `samples` rows per (theta12, r1) pair
    """
    blocks = []
    for theta12 in FIGURE_THETA12:
        for r1 in FIGURE_R1:
            spec = GeodesicSpec(r1=r1, r2=FIGURE_R2, theta12=theta12)
            theta = np.linspace(0.0, theta12, samples)
            r = geodesic_r(spec, theta)
            blocks.append(pd.DataFrame({
                'r1': r1,
                'theta12': theta12,
                'theta': theta,
                'x': r * np.sin(theta),
                'z': r * np.cos(theta),
            }))
    return pd.concat(blocks, ignore_index=True)
