"""
Unit Tests for bures

Tests the overlap matrix, the Bures minimum over decompositions, the Uhlmann
fidelity and the optimal rotation.
"""

import unittest

import numpy as np

from bures import (
    bures_line_element_sq,
    decomposition_distance_general,
    optimal_decomposition_unitary,
    overlap_matrix,
    uhlmann_fidelity,
)
from geometry_errors import NotUnitary, RankMismatch
from random_states import make_rng, random_density_matrix, random_unitary
from spectral_metric import line_element_sq
from state_space import DensityOperator, SpectralDecomposition, decompose


def random_decomp(dim, rng, rank=None):
    return decompose(DensityOperator(random_density_matrix(dim, rng, rank=rank)))


class TestOverlapMatrix(unittest.TestCase):
    """Test cases for overlap_matrix"""

    def setUp(self):
        self.rng = make_rng(60)

    def test_self_overlap_is_diagonal(self):
        a = random_decomp(3, self.rng)
        np.testing.assert_allclose(overlap_matrix(a, a).entries, np.diag(a.probs), atol=1e-14)
        self.assertAlmostEqual(overlap_matrix(a, a).trace_abs, 1.0, places=12)

    def test_frobenius_is_trace_product(self):
        for _ in range(10):
            rho = random_density_matrix(3, self.rng)
            sigma = random_density_matrix(3, self.rng)
            M = overlap_matrix(decompose(DensityOperator(rho)), decompose(DensityOperator(sigma)))
            self.assertAlmostEqual(M.frobenius_sq, np.trace(rho @ sigma).real, places=12)

    def test_rank_mismatch(self):
        with self.assertRaises(RankMismatch):
            overlap_matrix(random_decomp(3, self.rng), random_decomp(3, self.rng, rank=2))


class TestBuresLineElement(unittest.TestCase):
    """Test cases for bures_line_element_sq and uhlmann_fidelity"""

    def setUp(self):
        self.rng = make_rng(61)

    def test_commuting_states_give_hellinger(self):
        p, q = np.array([0.5, 0.3, 0.2]), np.array([0.1, 0.6, 0.3])
        a = decompose(DensityOperator(np.diag(p)))
        b = decompose(DensityOperator(np.diag(q)))
        expected = 2 - 2 * np.sum(np.sqrt(p * q))
        self.assertAlmostEqual(bures_line_element_sq(a, b), expected, places=12)
        self.assertAlmostEqual(uhlmann_fidelity(np.diag(p), np.diag(q)), np.sum(np.sqrt(p * q)), places=12)

    def test_fidelity_route(self):
        """Both routes to the Bures distance agree"""
        for dim, rank in ((2, None), (3, None), (4, None), (4, 2)):
            rho = random_density_matrix(dim, self.rng, rank=rank)
            sigma = random_density_matrix(dim, self.rng, rank=rank)
            a, b = decompose(DensityOperator(rho)), decompose(DensityOperator(sigma))
            fidelity = uhlmann_fidelity(rho, sigma)
            self.assertAlmostEqual(overlap_matrix(a, b).trace_abs, fidelity, delta=1e-7)
            self.assertAlmostEqual(bures_line_element_sq(a, b), 2 - 2 * fidelity, delta=1e-7)

    def test_fidelity_bounds(self):
        rho = random_density_matrix(3, self.rng)
        self.assertAlmostEqual(uhlmann_fidelity(rho, rho), 1.0, places=10)
        up, down = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
        self.assertAlmostEqual(uhlmann_fidelity(up, down), 0.0, places=12)
        self.assertAlmostEqual(bures_line_element_sq(decompose(DensityOperator(up)),
                                                     decompose(DensityOperator(down))), 2.0, places=12)

    def test_ordering(self):
        """Bures minimum never exceeds the spectral line element"""
        for _ in range(200):
            a, b = random_decomp(3, self.rng), random_decomp(3, self.rng)
            self.assertLessEqual(bures_line_element_sq(a, b), line_element_sq(a, b) + 1e-12)

    def test_identical_states(self):
        a = random_decomp(4, self.rng)
        self.assertAlmostEqual(bures_line_element_sq(a, a), 0.0, places=12)


class TestGeneralDecompositions(unittest.TestCase):
    """Test cases for decomposition_distance_general and optimal_decomposition_unitary"""

    def setUp(self):
        self.rng = make_rng(62)
        self.a = random_decomp(3, self.rng)
        self.b = random_decomp(3, self.rng)

    def test_identity_rotations_match_tuple_distance(self):
        eye = np.eye(3)
        direct = np.sum(np.abs(self.a.amplitudes() - self.b.amplitudes()) ** 2)
        self.assertAlmostEqual(decomposition_distance_general(self.a, self.b, eye, eye), direct, places=12)

    def test_bures_is_a_lower_bound(self):
        floor = bures_line_element_sq(self.a, self.b)
        for _ in range(200):
            V_a, V_b = random_unitary(3, self.rng), random_unitary(3, self.rng)
            self.assertGreaterEqual(decomposition_distance_general(self.a, self.b, V_a, V_b), floor - 1e-12)

    def test_optimal_rotation_attains_minimum(self):
        floor = bures_line_element_sq(self.a, self.b)
        for V_a in (None, random_unitary(3, self.rng)):
            V_b = optimal_decomposition_unitary(self.a, self.b, V_a)
            V_a = np.eye(3) if V_a is None else V_a
            self.assertAlmostEqual(decomposition_distance_general(self.a, self.b, V_a, V_b), floor, delta=1e-10)

    def test_rotations_validated(self):
        with self.assertRaises(NotUnitary):
            decomposition_distance_general(self.a, self.b, np.eye(3), 2 * np.eye(3))
        with self.assertRaises(NotUnitary):
            decomposition_distance_general(self.a, self.b, np.eye(2), np.eye(3))
        single = SpectralDecomposition(np.array([1.0]), np.eye(3)[:, :1])
        with self.assertRaises(RankMismatch):
            decomposition_distance_general(self.a, single, np.eye(3), np.eye(1))


if __name__ == '__main__':
    unittest.main()
