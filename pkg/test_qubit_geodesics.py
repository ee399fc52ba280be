"""
Unit Tests for qubit_geodesics

Tests the Bloch-ball line element, closed-form geodesics and lengths, the
numeric minimizer and the figure dataset.
"""

import unittest

import numpy as np

from geometry_errors import DomainError
from qubit_geodesics import (
    BlochPoint,
    FIGURE_R1,
    FIGURE_R2,
    GeodesicSpec,
    figure2_dataset,
    geodesic_between,
    geodesic_family,
    geodesic_length,
    geodesic_r,
    numeric_geodesic,
    qubit_distance,
    qubit_line_element_sq,
)
from random_states import make_rng
from spectral_metric import line_element_sq, path_length
from state_space import decompose, sample_path


class TestBlochPoint(unittest.TestCase):
    """Test cases for BlochPoint"""

    def test_density_round_trip(self):
        point = BlochPoint(r=0.6, theta=1.1, phi=4.0)
        back = BlochPoint.from_density(point.to_density())
        self.assertAlmostEqual(back.r, 0.6, places=12)
        self.assertAlmostEqual(back.theta, 1.1, places=12)
        self.assertAlmostEqual(back.phi, 4.0, places=12)

    def test_radius_bounds(self):
        for r in (0.0, -0.2, 1.1):
            with self.assertRaises(DomainError):
                BlochPoint(r=r)

    def test_maximally_mixed_has_no_angles(self):
        with self.assertRaises(DomainError):
            BlochPoint.from_density(0.5 * np.eye(2))


class TestLineElement(unittest.TestCase):
    """Test cases for qubit_line_element_sq"""

    def test_zero_displacement(self):
        self.assertEqual(qubit_line_element_sq(BlochPoint(0.4, 1.0), (0.0, 0.0, 0.0)), 0.0)

    def test_circle_arc_integrand(self):
        self.assertAlmostEqual(qubit_line_element_sq(BlochPoint(0.4, 1.0), (0.0, 0.01, 0.0)), 0.25e-4, places=18)

    def test_boundary(self):
        self.assertAlmostEqual(qubit_line_element_sq(BlochPoint(1.0, 0.5), (0.0, 0.02, 0.0)), 1e-4, places=18)
        with self.assertRaises(DomainError):
            qubit_line_element_sq(BlochPoint(1.0, 0.5), (0.01, 0.0, 0.0))

    def test_matches_spectral_metric(self):
        """Bloch form agrees with the decomposition line element to third order"""
        rng = make_rng(50)
        for _ in range(20):
            point = BlochPoint(r=rng.uniform(0.2, 0.8), theta=rng.uniform(0.3, 2.8), phi=rng.uniform(0, 2 * np.pi))
            direction = rng.normal(size=3)
            gaps = []
            for scale in (1e-3, 5e-4):
                dr, dtheta, dphi = scale * direction
                moved = BlochPoint(point.r + dr, point.theta + dtheta, point.phi + dphi)
                spectral = line_element_sq(decompose(point.to_density()), decompose(moved.to_density()))
                gaps.append(abs(spectral - qubit_line_element_sq(point, (dr, dtheta, dphi))))
            self.assertLess(gaps[0], 1e-7)
            self.assertLess(gaps[1], gaps[0])


class TestClosedForm(unittest.TestCase):
    """Test cases for geodesic_r and geodesic_length"""

    def test_endpoints(self):
        spec = GeodesicSpec(r1=0.1, r2=0.05, theta12=np.pi / 4)
        self.assertEqual(geodesic_r(spec, 0.0), 0.1)
        self.assertEqual(geodesic_r(spec, np.pi / 4), 0.05)

    def test_midpoint(self):
        spec = GeodesicSpec(r1=0.1, r2=0.05, theta12=np.pi / 4)
        expected = np.sin(0.5 * (np.arcsin(0.1) + np.arcsin(0.05)))
        self.assertAlmostEqual(geodesic_r(spec, np.pi / 8), expected, places=15)
        self.assertAlmostEqual(expected, 0.0750, places=3)

    def test_circle_arc(self):
        spec = GeodesicSpec(r1=0.5, r2=0.5, theta12=np.pi)
        np.testing.assert_allclose(geodesic_r(spec, np.linspace(0, np.pi, 7)), 0.5, atol=1e-15)
        self.assertEqual(geodesic_length(spec), np.pi / 2)

    def test_pure_state_distance(self):
        self.assertAlmostEqual(geodesic_length(GeodesicSpec(1.0, 1.0, 1.2)), 0.6, places=15)

    def test_reference_length(self):
        self.assertAlmostEqual(geodesic_length(GeodesicSpec(0.1, 0.05, np.pi / 4)), 0.39350, places=5)

    def test_flat_coordinates(self):
        """Length is the half Euclidean distance in (arcsin r, theta)"""
        spec = GeodesicSpec(0.3, 0.9, 2.0)
        du = np.arcsin(0.9) - np.arcsin(0.3)
        self.assertAlmostEqual(geodesic_length(spec), 0.5 * np.sqrt(4.0 + du ** 2), places=15)

    def test_domain(self):
        spec = GeodesicSpec(0.3, 0.9, 2.0)
        with self.assertRaises(DomainError):
            geodesic_r(spec, 2.5)
        with self.assertRaises(DomainError):
            GeodesicSpec(0.3, 0.9, 0.0)
        with self.assertRaises(DomainError):
            GeodesicSpec(0.0, 0.9, 1.0)

    def test_spectral_path_length_converges(self):
        spec = GeodesicSpec(0.3, 0.8, 2.0)
        family = geodesic_family(spec)
        errors = [abs(path_length(sample_path(family, np.linspace(0, 1, n))) - geodesic_length(spec))
                  for n in (51, 101)]
        self.assertLess(errors[1], 1e-4)
        self.assertGreater(errors[0] / errors[1], 3.0)

    def test_triangle_inequality(self):
        rng = make_rng(51)
        for _ in range(50):
            a, b, c = (BlochPoint(rng.uniform(0.05, 1.0), rng.uniform(0, np.pi)) for _ in range(3))
            self.assertLessEqual(qubit_distance(a, c), qubit_distance(a, b) + qubit_distance(b, c) + 1e-12)

    def test_geodesic_between(self):
        a, b = BlochPoint(0.4, 0.2), BlochPoint(0.7, 1.5)
        spec = geodesic_between(a, b)
        self.assertAlmostEqual(spec.theta12, 1.3, places=12)
        self.assertAlmostEqual(geodesic_length(spec), qubit_distance(a, b), places=15)
        self.assertAlmostEqual(qubit_distance(BlochPoint(0.4), BlochPoint(0.7)),
                               0.5 * (np.arcsin(0.7) - np.arcsin(0.4)), places=15)
        with self.assertRaises(DomainError):
            geodesic_between(BlochPoint(0.4), BlochPoint(0.7))


class TestNumericGeodesic(unittest.TestCase):
    """Test cases for numeric_geodesic"""

    def test_symmetric(self):
        curve = numeric_geodesic(GeodesicSpec(0.5, 0.5, 1.0), 101)
        np.testing.assert_allclose(curve.r, 0.5, atol=1e-8)

    def test_reference_length(self):
        curve = numeric_geodesic(GeodesicSpec(0.1, 0.05, np.pi / 4), 401)
        self.assertAlmostEqual(curve.length, 0.39350, delta=1e-5)

    def test_fuzzed_against_closed_form(self):
        rng = make_rng(52)
        for _ in range(50):
            spec = GeodesicSpec(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0), rng.uniform(0.1, np.pi))
            curve = numeric_geodesic(spec, 101)
            self.assertLess(np.max(np.abs(curve.r - geodesic_r(spec, curve.theta))), 1e-5)
            self.assertGreaterEqual(curve.length, geodesic_length(spec) - 1e-9)

    def test_fuzzed_over_sample_counts(self):
        rng = make_rng(53)
        for n_points in (3, 20, 101, 201, 401):
            for _ in range(50):
                spec = GeodesicSpec(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0), rng.uniform(0.1, np.pi))
                with self.subTest(n_points=n_points, spec=spec):
                    curve = numeric_geodesic(spec, n_points)
                    self.assertLess(np.max(np.abs(curve.r - geodesic_r(spec, curve.theta))), 1e-8)

    def test_figure_endpoints_coarse(self):
        for r1 in FIGURE_R1:
            spec = GeodesicSpec(r1, FIGURE_R2, np.pi)
            curve = numeric_geodesic(spec, 20)
            self.assertLess(np.max(np.abs(curve.r - geodesic_r(spec, curve.theta))), 1e-8)

    def test_too_few_points(self):
        with self.assertRaises(DomainError):
            numeric_geodesic(GeodesicSpec(0.5, 0.5, 1.0), 2)


class TestFigureDataset(unittest.TestCase):
    """Test cases for figure2_dataset"""

    @classmethod
    def setUpClass(cls):
        cls.df = figure2_dataset()

    def test_shape(self):
        self.assertEqual(list(self.df.columns), ['r1', 'theta12', 'theta', 'x', 'z'])
        self.assertEqual(len(self.df), 8 * 200)

    def test_curve_endpoints(self):
        for (theta12, r1), curve in self.df.groupby(['theta12', 'r1']):
            self.assertIn(r1, FIGURE_R1)
            self.assertEqual(curve['x'].iloc[0], 0.0)
            self.assertEqual(curve['z'].iloc[0], r1)
            self.assertAlmostEqual(np.hypot(curve['x'].iloc[-1], curve['z'].iloc[-1]), FIGURE_R2, places=15)

    def test_monotone_radius(self):
        for _, curve in self.df.groupby(['theta12', 'r1']):
            radius = np.hypot(curve['x'], curve['z']).to_numpy()
            if curve['r1'].iloc[0] > FIGURE_R2:
                self.assertTrue(np.all(np.diff(radius) < 1e-15))


if __name__ == '__main__':
    unittest.main()
