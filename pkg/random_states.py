"""
Seeded random samplers for fuzzing: Haar unitaries, Hermitian matrices and
density operators. Every sampler takes a numpy Generator so runs are
reproducible from a single seed.
"""

import numpy as np


def make_rng(seed):
    return np.random.default_rng(seed)


def ginibre(dim, rng, cols=None):
    cols = dim if cols is None else cols
    return rng.normal(size=(dim, cols)) + 1j * rng.normal(size=(dim, cols))


def random_unitary(dim, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    Q, R = np.linalg.qr(ginibre(dim, rng))
    diag = R.diagonal()
    return Q * (diag / np.abs(diag))


def random_hermitian(dim, rng, scale=1.0):
    G = ginibre(dim, rng)
    return scale * 0.5 * (G + G.conj().T)


def random_density_matrix(dim, rng, rank=None):
    """Random density matrix of the given rank (full rank by default)."""
    G = ginibre(dim, rng, cols=dim if rank is None else rank)
    rho = G @ G.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_bloch_vector(rng, r_min=0.1, r_max=0.9):
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return rng.uniform(r_min, r_max) * direction


def qubit_density_from_bloch(vector):
    x, y, z = vector
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]], dtype=np.complex128)


def random_qubit_density(rng, r_min=0.1, r_max=0.9):
    return qubit_density_from_bloch(random_bloch_vector(rng, r_min, r_max))
