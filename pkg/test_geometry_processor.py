"""
Unit Tests for Spectral Geometry Processors

Runs each processor on small configurations and checks the tables and stats
they produce.
"""

import unittest

import numpy as np

from geometry_errors import ConfigError, NotHermitian
from geometry_processor import (
    BuresProcessor,
    GeodesicProcessor,
    InterferometerProcessor,
    MetricPathProcessor,
    ThermalScanProcessor,
    relative_error,
)
from run_config import build_config
from settings import Settings


def matrix(rows, imag=None):
    spec = {'dim': len(rows), 'real': rows}
    if imag is not None:
        spec['imag'] = imag
    return spec


RHO_QUBIT = matrix([[0.8, 0.0], [0.0, 0.2]])
HALF_SIGMA_X = matrix([[0.0, 0.5], [0.5, 0.0]])


def run(processor_class, command, params, settings=None):
    processor = processor_class(build_config(params, command), settings or Settings())
    return processor.process(), processor


class TestMetricPathProcessor(unittest.TestCase):
    """Test cases for MetricPathProcessor"""

    def test_unitary_family(self):
        params = {'family': 'unitary', 'rho0': RHO_QUBIT, 'H': HALF_SIGMA_X,
                  'grid': {'start': 0.0, 'stop': 1.0, 'points': 101}}
        df, processor = run(MetricPathProcessor, 'metric-path', params)
        self.assertEqual(len(df), 99)
        self.assertEqual(list(df.columns), ['t', 'ds2_discrete', 'ds2_differential', 'fubini_study',
                                            'fisher_rao', 'speed', 'dispersion_speed'])
        np.testing.assert_allclose(df['dispersion_speed'], 0.5, atol=1e-12)
        np.testing.assert_allclose(df['speed'], 0.5, atol=1e-4)
        self.assertLess(df['fisher_rao'].abs().max(), 1e-20)
        self.assertEqual(processor.stats['rank'], 2)
        self.assertAlmostEqual(processor.stats['path_length'], 0.5, delta=1e-4)
        self.assertLess(processor.stats['max_speed_gap'], 1e-4)

    def test_tabulated_constant_path(self):
        params = {'family': 'tabulated', 'times': [0.0, 0.5, 1.0, 1.5], 'states': [RHO_QUBIT] * 4}
        df, processor = run(MetricPathProcessor, 'metric-path', params)
        self.assertEqual(len(df), 2)
        self.assertNotIn('dispersion_speed', df.columns)
        for column in ('ds2_discrete', 'ds2_differential', 'fubini_study', 'fisher_rao', 'speed'):
            np.testing.assert_allclose(df[column], 0.0, atol=1e-7)

    def test_config_errors(self):
        short = {'family': 'unitary', 'rho0': RHO_QUBIT, 'H': HALF_SIGMA_X,
                 'grid': {'start': 0.0, 'stop': 1.0, 'points': 2}}
        with self.assertRaises(ConfigError):
            run(MetricPathProcessor, 'metric-path', short)
        with self.assertRaises(ConfigError):
            run(MetricPathProcessor, 'metric-path', {'family': 'unitary', 'rho0': RHO_QUBIT})
        with self.assertRaises(ConfigError):
            run(MetricPathProcessor, 'metric-path',
                {'family': 'tabulated', 'times': [0.0, 1.0, 2.0], 'states': [RHO_QUBIT]})

    def test_dimension_mismatch(self):
        qutrit = matrix([[0.5, 0.0, 0.0], [0.0, 0.3, 0.0], [0.0, 0.0, 0.2]])
        unitary = {'family': 'unitary', 'rho0': qutrit, 'H': HALF_SIGMA_X,
                   'grid': {'start': 0.0, 'stop': 1.0, 'points': 5}}
        tabulated = {'family': 'tabulated', 'times': [0.0, 1.0, 2.0], 'states': [RHO_QUBIT, qutrit, RHO_QUBIT]}
        for params in (unitary, tabulated):
            with self.subTest(family=params['family']):
                with self.assertRaises(ConfigError):
                    run(MetricPathProcessor, 'metric-path', params)

    def test_non_hermitian_hamiltonian(self):
        params = {'family': 'unitary', 'rho0': RHO_QUBIT, 'H': matrix([[0.0, 1.0], [0.0, 0.0]]),
                  'grid': {'start': 0.0, 'stop': 1.0, 'points': 5}}
        with self.assertRaises(NotHermitian):
            run(MetricPathProcessor, 'metric-path', params)


class TestGeodesicProcessor(unittest.TestCase):
    """Test cases for GeodesicProcessor"""

    def test_figure_preset(self):
        df, processor = run(GeodesicProcessor, 'geodesic', {'preset': 'figure2'})
        self.assertEqual(len(df), 1600)
        self.assertEqual(list(df.columns)[:5], ['r1', 'theta12', 'theta', 'x', 'z'])
        self.assertEqual(processor.stats['curves'], 8)
        self.assertLess(processor.stats['max_pointwise_gap'], 1e-5)
        self.assertLess(processor.stats['max_length_gap'], 1e-8)

    def test_single_curve(self):
        df, _ = run(GeodesicProcessor, 'geodesic', {'r1': 0.1, 'r2': 0.05, 'theta12': np.pi / 4, 'samples': 101})
        self.assertEqual(len(df), 101)
        self.assertAlmostEqual(df['length_closed'].iloc[0], 0.39350, places=5)

    def test_solver_grid(self):
        df, processor = run(GeodesicProcessor, 'geodesic',
                            {'r1': 0.1, 'r2': 0.05, 'theta12': np.pi / 4, 'samples': 11, 'n_points': 401})
        self.assertEqual(len(df), 11)
        self.assertEqual(df['r_numeric'].iloc[0], 0.1)
        self.assertEqual(df['r_numeric'].iloc[-1], 0.05)
        self.assertLess(processor.stats['max_pointwise_gap'], 1e-5)
        self.assertLess(processor.stats['max_length_gap'], 1e-12)

    def test_missing_endpoint(self):
        with self.assertRaises(ConfigError):
            run(GeodesicProcessor, 'geodesic', {'r1': 0.1, 'theta12': 1.0})


class TestBuresProcessor(unittest.TestCase):
    """Test cases for BuresProcessor"""

    def test_explicit_pair(self):
        sigma = matrix([[0.5, 0.2], [0.2, 0.5]], imag=[[0.0, -0.1], [0.1, 0.0]])
        df, _ = run(BuresProcessor, 'bures', {'pairs': [{'rho': RHO_QUBIT, 'sigma': sigma}]})
        row = df.iloc[0]
        self.assertEqual(row['pair'], 'pair-0')
        self.assertLess(row['route_gap'], 1e-9)
        self.assertTrue(row['ordering_ok'])
        self.assertAlmostEqual(row['bures_overlap'], 2 - 2 * row['fidelity'], delta=1e-9)

    def test_fuzz_is_seeded(self):
        params = {'fuzz': {'count': 20, 'dim_min': 2, 'dim_max': 4}}
        first, processor = run(BuresProcessor, 'bures', params, Settings(seed=7))
        second, _ = run(BuresProcessor, 'bures', params, Settings(seed=7))
        self.assertTrue(first.equals(second))
        self.assertEqual(processor.stats['ordering_violations'], 0)
        self.assertLess(processor.stats['max_route_gap'], 1e-8)
        self.assertTrue(first['dim'].between(2, 4).all())

    def test_empty_config(self):
        with self.assertRaises(ConfigError):
            run(BuresProcessor, 'bures', {})


class TestInterferometerProcessor(unittest.TestCase):
    """Test cases for InterferometerProcessor"""

    def setUp(self):
        self.params = {
            'rho': matrix([[0.7, 0.0], [0.0, 0.3]]),
            'H': matrix([[0.3, 0.4], [0.4, -0.2]]),
            'delta_t': 0.01,
        }

    def test_unitary_rows(self):
        df, processor = run(InterferometerProcessor, 'interfere', self.params)
        self.assertEqual(list(df['scale']), [1.0, 0.5])
        self.assertLess(processor.stats['max_closed_form_gap'], 1e-12)
        self.assertTrue((df['p0_max'] >= df['p0'] - 1e-12).all())
        self.assertGreater(processor.stats['residual_ratio'], 14.0)
        self.assertLess(processor.stats['residual_ratio'], 18.0)

    def test_purified_rows(self):
        params = dict(self.params, delta_p=[0.01, -0.01])
        df, processor = run(InterferometerProcessor, 'interfere', params)
        self.assertIn('p0_purified', df.columns)
        np.testing.assert_allclose(df['p0_purified'], df['p0_purified_closed_form'], atol=1e-12)
        self.assertGreater(processor.stats['residual_ratio_purified'], 6.0)
        self.assertLess(processor.stats['residual_ratio_purified'], 10.0)

    def test_wrong_sizes(self):
        cases = [
            dict(self.params, H=matrix([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, -1.0]])),
            dict(self.params, phases=[0.0, 0.1, 0.2]),
            dict(self.params, delta_p=[0.01]),
        ]
        for params in cases:
            with self.subTest(params=sorted(params)):
                with self.assertRaises(ConfigError):
                    run(InterferometerProcessor, 'interfere', params)


class TestThermalScanProcessor(unittest.TestCase):
    """Test cases for ThermalScanProcessor"""

    def test_single_spin_grid(self):
        params = {'preset': 'single_spin', 'betas': [1.0, 2.0], 'fields': {'start': 0.2, 'stop': 0.5, 'points': 2}}
        df, processor = run(ThermalScanProcessor, 'thermal-scan', params)
        self.assertEqual(len(df), 4)
        first = df.iloc[0]
        x = first['beta'] * first['b'] / 2
        self.assertAlmostEqual(first['C_V'], x ** 2 / np.cosh(x) ** 2, places=12)
        self.assertEqual(first['sum_p_chiF'], 0.0)
        self.assertLess(processor.stats['max_rel_err_dbeta'], 1e-5)
        self.assertLess(processor.stats['max_rel_err_db'], 1e-5)

    def test_transverse_preset(self):
        params = {'preset': 'transverse', 'betas': [1.3], 'fields': [0.2]}
        df, processor = run(ThermalScanProcessor, 'thermal-scan', params)
        self.assertEqual(processor.stats['dimension'], 8)
        self.assertGreater(df['sum_p_chiF'].iloc[0], 0.0)
        self.assertLess(processor.stats['max_rel_err_db'], 1e-5)


class TestRelativeError(unittest.TestCase):
    """Test cases for relative_error"""

    def test_floor(self):
        self.assertEqual(relative_error(1.0, 2.0), 0.5)
        self.assertAlmostEqual(relative_error(1e-13, 0.0), 0.1, places=12)


if __name__ == '__main__':
    unittest.main()
