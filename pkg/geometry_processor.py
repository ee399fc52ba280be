"""
Spectral Geometry Processors
Batch computations behind the CLI commands

Features:
- Metric along unitary or tabulated paths (discrete vs differential line element)
- Qubit geodesic curves with closed-form and numeric lengths
- Bures line element by the overlap-matrix and fidelity routes, with fuzzing
- Interferometric estimate of the line element, unitary and purified
- Thermal sweeps of the metric coefficients against finite differences

Each processor reads a RunConfig, returns a pandas DataFrame and keeps a stats
dict for print_summary(). Summaries go to stderr; stdout carries the CSV.
"""

import sys

import numpy as np
import pandas as pd

from bures import bures_line_element_sq, overlap_matrix, uhlmann_fidelity
from geometry_errors import ConfigError
from interferometry import (
    NonunitaryStep,
    maximize_P0,
    maximize_purified_P0,
    purified_p0_closed_form,
    run_unitary,
)
from hermitian_core import unitary_exp
from qubit_geodesics import (
    FIGURE_R1,
    FIGURE_R2,
    FIGURE_THETA12,
    GeodesicSpec,
    figure2_dataset,
    geodesic_length,
    geodesic_r,
    numeric_geodesic,
)
from random_states import make_rng, random_density_matrix
from run_config import parse_grid, parse_matrix, parse_values
from spectral_metric import differential_line_element, line_element_sq, path_length
from state_space import DensityOperator, consecutive_overlaps, decompose, sample_path
from thermal import (
    build_heisenberg_chain,
    metric_db,
    metric_db_fd,
    metric_dbeta,
    metric_dbeta_fd,
    single_spin_model,
    specific_heat,
    susceptibilities,
    thermal_state,
)
from unitary_dynamics import branch_dispersions, evolve, unitary_family

CSV_FLOAT_FORMAT = '%.17g'
RELATIVE_FLOOR = 1e-12


def log(message=''):
    print(message, file=sys.stderr)


def write_csv(df, out=None):
    """Deterministic CSV: header row, LF line endings, 17 significant digits."""
    text = df.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, 'w', newline='') as handle:
            handle.write(text)
    return text


def relative_error(estimate, reference):
    return abs(estimate - reference) / max(abs(reference), RELATIVE_FLOOR)


class GeometryProcessor:
    """Shared plumbing: config, tolerances and a stats dict."""

    title = "Spectral Geometry"

    def __init__(self, config, settings):
        """
        Args:
            config: RunConfig for this processor's command
            settings: Settings (tol, seed, fd_step)
        """
        self.config = config
        self.settings = settings
        self.tolerances = config.tolerances
        self.stats = {}

    def _matrix(self, key, hermitian=False):
        return parse_matrix(self.config.get(key), hermitian=hermitian, tol=self.settings.tol, name=key)

    def _density(self, spec, name):
        matrix = parse_matrix(spec, hermitian=True, tol=self.settings.tol, name=name)
        return DensityOperator(matrix, self.settings.tol)

    def _check_dims(self, rho, H, rho_name):
        if H.shape != (rho.dim, rho.dim):
            raise ConfigError(f"H has dimension {H.shape[0]} but {rho_name} has dimension {rho.dim}")

    def _decompose(self, rho):
        return decompose(rho, self.tolerances['rank_tol'], self.tolerances['degeneracy_tol'])

    def print_summary(self):
        log("\n" + "=" * 60)
        log(f"{self.title} Summary")
        log("=" * 60)
        for key, value in self.stats.items():
            label = key.replace('_', ' ').capitalize()
            if isinstance(value, float):
                log(f"{label}: {value:.6g}")
            else:
                log(f"{label}: {value}")
        log("=" * 60 + "\n")


class MetricPathProcessor(GeometryProcessor):
    """Line element along a sampled path of density operators."""

    title = "Metric Path"

    def _build_path(self):
        family_kind = self.config.get('family')
        if family_kind == 'unitary':
            if self.config.get('rho0') is None or self.config.get('H') is None or self.config.get('grid') is None:
                raise ConfigError("unitary family needs rho0, H and grid")
            rho0 = self._density(self.config.get('rho0'), 'rho0')
            H = self._matrix('H', hermitian=True)
            self._check_dims(rho0, H, 'rho0')
            grid = parse_grid(self.config.get('grid'))
            return unitary_family(rho0, H, self.settings.tol), grid, H

        times = self.config.get('times')
        states = self.config.get('states')
        if times is None or states is None:
            raise ConfigError("tabulated family needs times and states")
        if len(times) != len(states):
            raise ConfigError(f"{len(times)} times but {len(states)} states")
        lookup = {
            float(t): self._density(spec, f'states[{i}]')
            for i, (t, spec) in enumerate(zip(times, states))
        }
        dims = {rho.dim for rho in lookup.values()}
        if len(dims) > 1:
            raise ConfigError(f"tabulated states mix dimensions {sorted(dims)}")
        return (lambda t: lookup[float(t)]), np.asarray(times, dtype=float), None

    def process(self):
        family, grid, H = self._build_path()
        if len(grid) < 3:
            raise ConfigError("a metric path needs at least three grid points")
        log(f"Sampling path on {len(grid)} grid points...")
        path = sample_path(family, grid, **self.tolerances)

        rows = []
        for i in range(1, len(path) - 1):
            breakdown = differential_line_element(path, i)
            dt = path.step(i)
            row = {
                't': path.times[i],
                'ds2_discrete': line_element_sq(path.decomps[i], path.decomps[i + 1]),
                'ds2_differential': breakdown.total,
                'fubini_study': breakdown.fubini_study,
                'fisher_rao': breakdown.fisher_rao,
                'speed': np.sqrt(breakdown.total) / dt,
            }
            if H is not None:
                decomp = path.decomps[i]
                row['dispersion_speed'] = np.sqrt(np.sum(decomp.probs * branch_dispersions(decomp, H)))
            rows.append(row)

        df = pd.DataFrame(rows)
        overlaps = consecutive_overlaps(path)
        self.stats = {
            'grid_points': len(path),
            'rank': path.rank,
            'path_length': path_length(path),
            'min_consecutive_overlap': float(np.min(overlaps.real)),
        }
        if H is not None:
            self.stats['max_speed_gap'] = float(np.max(np.abs(df['speed'] - df['dispersion_speed'])))
        return df


class GeodesicProcessor(GeometryProcessor):
    """Qubit geodesics in the xz-plane."""

    title = "Qubit Geodesics"

    def _curve(self, spec, samples):
        theta = np.linspace(0.0, spec.theta12, samples)
        r = geodesic_r(spec, theta)
        return pd.DataFrame({
            'r1': spec.r1,
            'theta12': spec.theta12,
            'theta': theta,
            'x': r * np.sin(theta),
            'z': r * np.cos(theta),
        })

    def _lengths(self, spec, samples, n_points):
        theta = np.linspace(0.0, spec.theta12, samples)
        numeric = numeric_geodesic(spec, n_points)
        # Numeric radii are linearly interpolated when the solver grid differs
        r_numeric = numeric.r if n_points == samples else np.interp(theta, numeric.theta, numeric.r)
        return pd.DataFrame({
            'r2': spec.r2,
            'r': geodesic_r(spec, theta),
            'r_numeric': r_numeric,
            'length_closed': geodesic_length(spec),
            'length_numeric': numeric.length,
        })

    def process(self):
        samples = self.config.get('samples', 200)
        n_points = self.config.get('n_points') or samples
        if self.config.get('preset') == 'figure2':
            curves = figure2_dataset(samples)
            specs = [
                GeodesicSpec(r1=r1, r2=FIGURE_R2, theta12=theta12)
                for theta12 in FIGURE_THETA12 for r1 in FIGURE_R1
            ]
        else:
            missing = [key for key in ('r1', 'r2', 'theta12') if self.config.get(key) is None]
            if missing:
                raise ConfigError(f"geodesic config needs {', '.join(missing)} (or preset)")
            specs = [GeodesicSpec(self.config.get('r1'), self.config.get('r2'), self.config.get('theta12'))]
            curves = self._curve(specs[0], samples)

        log(f"Computing {len(specs)} geodesic curve(s)...")
        lengths = pd.concat([self._lengths(spec, samples, n_points) for spec in specs], ignore_index=True)
        df = pd.concat([curves, lengths], axis=1)
        self.stats = {
            'curves': len(specs),
            'rows': len(df),
            'max_pointwise_gap': float(np.max(np.abs(df['r'] - df['r_numeric']))),
            'max_length_gap': float(np.max(np.abs(df['length_closed'] - df['length_numeric']))),
        }
        return df


class BuresProcessor(GeometryProcessor):
    """Bures element by two routes, compared with the spectral line element."""

    title = "Bures Comparison"

    def _compare(self, label, rho, sigma):
        a, b = self._decompose(rho), self._decompose(sigma)
        spectral_route = bures_line_element_sq(a, b)
        kept_mass = float(np.sum(a.probs) + np.sum(b.probs))
        fidelity = uhlmann_fidelity(rho, sigma, self.settings.tol)
        fidelity_route = max(kept_mass - 2.0 * fidelity, 0.0)
        spectral_metric = line_element_sq(a, b)
        return {
            'pair': label,
            'dim': rho.dim,
            'trace_abs_M': overlap_matrix(a, b).trace_abs,
            'fidelity': fidelity,
            'bures_overlap': spectral_route,
            'bures_fidelity': fidelity_route,
            'line_element': spectral_metric,
            'route_gap': abs(spectral_route - fidelity_route),
            'ordering_ok': bool(spectral_route <= spectral_metric + self.settings.tol),
        }

    def process(self):
        rows = []
        for i, pair in enumerate(self.config.get('pairs', [])):
            rho = self._density(pair['rho'], f'pairs[{i}].rho')
            sigma = self._density(pair['sigma'], f'pairs[{i}].sigma')
            rows.append(self._compare(f'pair-{i}', rho, sigma))

        fuzz = self.config.get('fuzz')
        if fuzz is not None:
            count = fuzz.get('count', 500)
            dim_min, dim_max = fuzz.get('dim_min', 2), fuzz.get('dim_max', 6)
            if dim_max < dim_min:
                raise ConfigError(f"fuzz dim_max={dim_max} is below dim_min={dim_min}")
            rng = make_rng(self.settings.seed)
            log(f"Fuzzing {count} random pairs (dims {dim_min}-{dim_max}, seed {self.settings.seed})...")
            for i in range(count):
                dim = int(rng.integers(dim_min, dim_max + 1))
                rho = DensityOperator(random_density_matrix(dim, rng), self.settings.tol)
                sigma = DensityOperator(random_density_matrix(dim, rng), self.settings.tol)
                rows.append(self._compare(f'fuzz-{i}', rho, sigma))

        if not rows:
            raise ConfigError("bures config needs pairs or fuzz")
        df = pd.DataFrame(rows)
        self.stats = {
            'pairs': len(df),
            'max_route_gap': float(df['route_gap'].max()),
            'ordering_violations': int((~df['ordering_ok']).sum()),
        }
        return df


class InterferometerProcessor(GeometryProcessor):
    """Mach-Zehnder estimate of the line element at dt and dt/2."""

    title = "Interferometer"

    SCALES = (1.0, 0.5)

    def _unitary_row(self, rho, decomp, H, delta_t, phases):
        outcome = run_unitary(rho, H, delta_t, phases, **self._decomp_tols())
        best = maximize_P0(rho, H, delta_t, **self._decomp_tols())
        evolved = self._decompose(evolve(rho, H, delta_t, self.settings.tol))
        ds2_discrete = line_element_sq(decomp, evolved)
        ds2_metric = float(np.sum(decomp.probs * branch_dispersions(decomp, H))) * delta_t ** 2
        row = {
            'delta_t': delta_t,
            'p0': outcome.p0,
            'p1': outcome.p1,
            'p0_closed_form': outcome.p0_closed_form,
            'p0_max': best.p0_max,
            'prediction_discrete': 1.0 - 0.25 * ds2_discrete,
            'prediction_metric': 1.0 - 0.25 * ds2_metric,
            'residual': abs(best.p0_max - (1.0 - 0.25 * ds2_metric)),
        }
        for k, f in enumerate(best.fstar):
            row[f'fstar_{k}'] = f
        return row

    def _purified_row(self, decomp, H, delta_t, delta_p):
        U = unitary_exp(H, delta_t, self.settings.tol)
        best = maximize_purified_P0(decomp, delta_p, U, self.settings.tol)
        step = NonunitaryStep(delta_p=delta_p, U=U, phases=best.fstar)
        fubini_study = float(np.sum(decomp.probs * branch_dispersions(decomp, H))) * delta_t ** 2
        fisher_rao = 0.25 * float(np.sum(np.asarray(delta_p) ** 2 / decomp.probs))
        prediction = 1.0 - 0.25 * (fubini_study + fisher_rao)
        return {
            'p0_purified': best.p0_max,
            'p0_purified_closed_form': purified_p0_closed_form(decomp, step),
            'fisher_rao': fisher_rao,
            'prediction_purified': prediction,
            'residual_purified': abs(best.p0_max - prediction),
        }

    def _decomp_tols(self):
        return {
            'rank_tol': self.tolerances['rank_tol'],
            'degeneracy_tol': self.tolerances['degeneracy_tol'],
        }

    def process(self):
        rho = self._density(self.config.get('rho'), 'rho')
        H = self._matrix('H', hermitian=True)
        self._check_dims(rho, H, 'rho')
        decomp = self._decompose(rho)
        delta_t = float(self.config.get('delta_t'))
        phases = np.asarray(self.config.get('phases', np.zeros(decomp.rank)), dtype=float)
        delta_p = self.config.get('delta_p')
        if delta_p is not None:
            delta_p = np.asarray(delta_p, dtype=float) * self.config.get('epsilon', 1.0)
        for name, values in (('phases', phases), ('delta_p', delta_p)):
            if values is not None and values.shape != (decomp.rank,):
                raise ConfigError(f"{name} needs {decomp.rank} entries, one per kept eigenvalue")

        rows = []
        for scale in self.SCALES:
            log(f"Running interferometer at delta_t={delta_t * scale:g}...")
            row = {'scale': scale, **self._unitary_row(rho, decomp, H, delta_t * scale, phases)}
            if delta_p is not None:
                row.update(self._purified_row(decomp, H, delta_t * scale, delta_p * scale))
            rows.append(row)
        df = pd.DataFrame(rows)

        self.stats = {
            'rank': decomp.rank,
            'max_closed_form_gap': float(np.max(np.abs(df['p0'] - df['p0_closed_form']))),
            'p0_max': float(df['p0_max'].iloc[0]),
            'residual_ratio': self._ratio(df['residual']),
        }
        if delta_p is not None:
            self.stats['residual_ratio_purified'] = self._ratio(df['residual_purified'])
        return df

    @staticmethod
    def _ratio(residuals):
        coarse, fine = float(residuals.iloc[0]), float(residuals.iloc[1])
        return coarse / fine if fine > 0 else float('nan')


class ThermalScanProcessor(GeometryProcessor):
    """Sweep (beta, b) and compare the metric coefficients with finite differences."""

    title = "Thermal Scan"

    def _model(self):
        preset = self.config.get('preset')
        if preset == 'single_spin':
            return single_spin_model()
        n = self.config.get('n', 3)
        J = self.config.get('J', 1.0)
        transverse = self.config.get('transverse', 0.3) if preset == 'transverse' else 0.0
        return build_heisenberg_chain(n, J, transverse=transverse)

    def process(self):
        model = self._model()
        betas = parse_values(self.config.get('betas'))
        fields = parse_values(self.config.get('fields'))
        step = self.config.get('fd_step', self.settings.fd_step)
        tols = {
            'rank_tol': self.tolerances['rank_tol'],
            'degeneracy_tol': self.tolerances['degeneracy_tol'],
        }
        log(f"Scanning {len(betas)} x {len(fields)} (beta, b) points on a {model.dim}-level model...")

        rows = []
        for b in fields:
            at_field = model.with_field(b)
            for beta in betas:
                chi = susceptibilities(at_field, beta, tols['degeneracy_tol'])
                weights = thermal_state(at_field, beta).weights
                dbeta = metric_dbeta(at_field, beta)
                db = metric_db(at_field, beta, tols['degeneracy_tol'])
                dbeta_fd = metric_dbeta_fd(at_field, beta, step, **tols)
                db_fd, _, _ = metric_db_fd(at_field, beta, step, **tols)
                rows.append({
                    'beta': beta,
                    'b': b,
                    'C_V': specific_heat(at_field, beta),
                    'chi_M': chi.chi_M,
                    'sum_p_chiF': float(np.sum(weights * chi.chi_F)),
                    'metric_dbeta': dbeta,
                    'metric_db': db,
                    'metric_dbeta_fd': dbeta_fd,
                    'metric_db_fd': db_fd,
                    'rel_err_dbeta': relative_error(dbeta_fd, dbeta),
                    'rel_err_db': relative_error(db_fd, db),
                })

        df = pd.DataFrame(rows)
        self.stats = {
            'preset': self.config.get('preset'),
            'dimension': model.dim,
            'points': len(df),
            'max_rel_err_dbeta': float(df['rel_err_dbeta'].max()),
            'max_rel_err_db': float(df['rel_err_db'].max()),
        }
        return df


PROCESSORS = {
    'metric-path': MetricPathProcessor,
    'geodesic': GeodesicProcessor,
    'bures': BuresProcessor,
    'interfere': InterferometerProcessor,
    'thermal-scan': ThermalScanProcessor,
}
