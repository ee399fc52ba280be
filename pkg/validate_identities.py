"""
Identity Validation Script

Runs the numerical identities of the spectral-decomposition metric against
independent oracles with fixed seeds and reports each check.
"""

import itertools
import json
import sys
import tempfile
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from bures import bures_line_element_sq, uhlmann_fidelity
from interferometry import maximize_P0, maximize_purified_P0, run_unitary
from hermitian_core import unitary_exp
from qubit_geodesics import (
    BlochPoint,
    FIGURE_R1,
    FIGURE_R2,
    GeodesicSpec,
    figure2_dataset,
    geodesic_length,
    geodesic_r,
    numeric_geodesic,
    qubit_distance,
)
from random_states import make_rng, random_density_matrix, random_hermitian, random_qubit_density
from settings import get_settings
from spectral_cli import cli
from spectral_metric import decomposition_distance_sq, differential_line_element, line_element_sq
from state_space import DensityOperator, SpectralDecomposition, decompose, sample_path
from thermal import (
    build_heisenberg_chain,
    metric_db,
    metric_db_fd,
    metric_dbeta,
    metric_dbeta_fd,
    single_spin_model,
    susceptibilities,
)
from unitary_dynamics import dispersions, evolve, speed, uncertainty_check, unitary_family

PHASE_GRID = 360
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def mark(ok):
    return "✓" if ok else "⚠️ "


def phase_grid_minimum(a, b):
    """Minimum of the decomposition distance over a grid of relative branch phases."""
    phases = np.linspace(0.0, 2 * np.pi, PHASE_GRID, endpoint=False)
    overlaps = np.einsum('ik,ik->k', a.vectors.conj(), b.vectors)
    # Per-branch distance as a function of the relative phase; the total is their sum
    terms = [
        a.probs[k] + b.probs[k] - 2 * np.sqrt(a.probs[k] * b.probs[k]) * np.real(overlaps[k] * np.exp(1j * phases))
        for k in range(a.rank)
    ]
    head = terms[0] if a.rank == 1 else terms[0][:, None] + terms[1][None, :]
    # Remaining phases are looped over on top of the two-phase grid
    return float(min(np.min(head + sum(tail)) for tail in itertools.product(*terms[2:])))


def check_minimization(rng):
    print("1. Phase Minimization")
    worst, below = 0.0, 0
    for i in range(200):
        dim = 2 if i % 2 == 0 else 3
        a = decompose(DensityOperator(random_density_matrix(dim, rng)))
        b = decompose(DensityOperator(random_density_matrix(dim, rng)))
        exact = line_element_sq(a, b)
        grid = phase_grid_minimum(a, b)
        worst = max(worst, grid - exact)
        below += int(grid < exact - 1e-12)
        # One grid point through the full distance for consistency
        rephased = b.with_phases(rng.uniform(0, 2 * np.pi, b.rank))
        below += int(decomposition_distance_sq(a, rephased) < exact - 1e-12)
    ok = worst < 1e-4 and below == 0
    print(f"   {mark(ok)} max grid gap {worst:.2e}, points below the minimum: {below}")
    return ok


def _residual(family, t, dt):
    path = sample_path(family, [t - dt, t, t + dt])
    discrete = line_element_sq(path.decomps[1], path.decomps[2])
    return abs(discrete - differential_line_element(path, 1).total)


def check_differential_split():
    print("\n2. Differential Split Order")
    rho0 = DensityOperator(np.diag([0.8, 0.2]).astype(np.complex128))
    H = 0.5 * SIGMA_X + SIGMA_Z
    eigen_family = unitary_family(rho0, H)

    def unitary(t):
        return eigen_family(t + t * t)

    def classical(t):
        return DensityOperator(np.diag([0.6 + 0.2 * t, 0.4 - 0.2 * t]).astype(np.complex128))

    ok = True
    for name, family in (('unitary', unitary), ('classical', classical)):
        ratio = _residual(family, 0.5, 1e-2) / _residual(family, 0.5, 5e-3)
        passed = 6.0 <= ratio <= 10.0
        ok = ok and passed
        print(f"   {mark(passed)} {name} family: residual ratio {ratio:.3f}")
    return ok


def check_dispersion_speed(rng):
    print("\n3. Energy-Dispersion Speed")
    worst = 0.0
    for i in range(100):
        dim = 2 if i % 2 == 0 else 3
        rho0 = random_density_matrix(dim, rng)
        H = random_hermitian(dim, rng)
        path = sample_path(unitary_family(rho0, H), [0.0, 1e-4, 2e-4])
        metric_speed, dispersion_speed = speed(path, 1, H)
        worst = max(worst, abs(metric_speed - dispersion_speed) / dispersion_speed)

    rho0 = np.diag([0.8, 0.2]).astype(np.complex128)
    path = sample_path(unitary_family(rho0, 0.5 * SIGMA_X), [0.0, 1e-4, 2e-4])
    exact, _ = speed(path, 1, 0.5 * SIGMA_X)
    ok = worst < 1e-6 and abs(exact - 0.5) < 1e-6
    print(f"   {mark(ok)} max relative error {worst:.2e}; reference speed {exact:.9f}")
    return ok


def check_dispersion_inequality(rng):
    print("\n4. Averaged vs Standard Dispersion")
    violations = 0
    for i in range(1000):
        dim = int(rng.integers(2, 5))
        report = dispersions(random_density_matrix(dim, rng), random_hermitian(dim, rng))
        violations += int(report.avg_dispersion_sq > report.rho_dispersion_sq + 1e-12)
    tight = dispersions(np.diag([0.8, 0.2]), SIGMA_X)
    gap = abs(tight.avg_dispersion_sq - tight.rho_dispersion_sq)
    ok = violations == 0 and gap < 1e-12
    print(f"   {mark(ok)} violations: {violations}; tight case gap {gap:.1e}")
    return ok


def check_uncertainty_chain(rng):
    print("\n5. Time-Energy Uncertainty Chain")
    failures = 0
    times = np.linspace(0.0, 1.0, 1001)
    for _ in range(100):
        rho0 = random_qubit_density(rng)
        H = random_hermitian(2, rng)
        report = uncertainty_check(sample_path(unitary_family(rho0, H), times), H)
        start = BlochPoint.from_density(rho0)
        end = BlochPoint.from_density(evolve(rho0, H, 1.0))
        l_g = qubit_distance(start, end)
        chain = (report.lhs_rho >= report.lhs_avg - 1e-6
                 and abs(report.lhs_avg - report.path_len) < 1e-6
                 and report.path_len >= l_g - 1e-6)
        failures += int(not chain)
    ok = failures == 0
    print(f"   {mark(ok)} chain failures: {failures} of 100")
    return ok


def check_interferometry(rng):
    print("\n6. Interferometry")
    rho = DensityOperator(random_density_matrix(3, rng))
    H = random_hermitian(3, rng)
    outcome = run_unitary(rho, H, 0.3, rng.uniform(0, 2 * np.pi, 3))
    closed_gap = abs(outcome.p0 - outcome.p0_closed_form)

    avg = dispersions(rho, H).avg_dispersion_sq
    errors = [abs(4 * (1 - maximize_P0(rho, H, dt).p0_max) / dt ** 2 - avg) for dt in (1e-2, 5e-3)]
    order = errors[0] / errors[1]

    decomp = decompose(rho)
    direction = np.array([0.03, -0.01, -0.02])

    def purified_residual(eps):
        U = unitary_exp(H, eps)
        p0 = maximize_purified_P0(decomp, eps * direction, U).p0_max
        predicted = 0.25 * (avg * eps ** 2 + 0.25 * np.sum((eps * direction) ** 2 / decomp.probs))
        return abs((1 - p0) - predicted)

    purified_order = purified_residual(1e-2) / purified_residual(5e-3)
    ok = closed_gap < 1e-12 and 3.0 <= order <= 5.0 and 6.0 <= purified_order <= 10.0
    print(f"   {mark(ok)} closed-form gap {closed_gap:.1e}; second-order ratio {order:.3f}; "
          f"purified ratio {purified_order:.3f}")
    return ok


def check_geodesics(rng):
    print("\n7. Qubit Geodesics")
    worst = 0.0
    for _ in range(50):
        spec = GeodesicSpec(r1=rng.uniform(0.05, 0.95), r2=rng.uniform(0.05, 0.95),
                            theta12=rng.uniform(0.1, np.pi))
        numeric = numeric_geodesic(spec, 201)
        worst = max(worst, float(np.max(np.abs(numeric.r - geodesic_r(spec, numeric.theta)))))
    arc = geodesic_length(GeodesicSpec(0.5, 0.5, np.pi))
    pure = geodesic_length(GeodesicSpec(1.0, 1.0, np.pi / 3))
    figure = figure2_dataset()
    ends = figure.groupby(['theta12', 'r1'], sort=False)
    starts_ok = all(abs(group['z'].iloc[0] - r1) < 1e-15 for (_, r1), group in ends)
    radii = np.hypot(figure['x'], figure['z'])
    ends_ok = all(abs(radii[group.index[-1]] - FIGURE_R2) < 1e-12 for _, group in ends)
    ok = (worst < 1e-5 and abs(arc - np.pi / 2) < 1e-15 and abs(pure - np.pi / 6) < 1e-15
          and ends.ngroups == 2 * len(FIGURE_R1) and starts_ok and ends_ok)
    print(f"   {mark(ok)} max pointwise gap {worst:.2e}; arc {arc:.12f}; curves {ends.ngroups}")
    return ok


def check_bures(rng):
    print("\n8. Bures Equivalence")
    worst, violations = 0.0, 0
    for _ in range(500):
        dim = int(rng.integers(2, 7))
        rho = DensityOperator(random_density_matrix(dim, rng))
        sigma = DensityOperator(random_density_matrix(dim, rng))
        a, b = decompose(rho), decompose(sigma)
        bures = bures_line_element_sq(a, b)
        worst = max(worst, abs(bures - (2 - 2 * uhlmann_fidelity(rho, sigma))))
        violations += int(bures > line_element_sq(a, b) + 1e-12)
    p = SpectralDecomposition(np.array([0.7, 0.3]), np.eye(2))
    q = SpectralDecomposition(np.array([0.6, 0.4]), np.eye(2))
    commuting_gap = abs(bures_line_element_sq(p, q) - line_element_sq(p, q))
    ok = worst < 1e-10 and violations == 0 and commuting_gap < 1e-14
    print(f"   {mark(ok)} max route gap {worst:.2e}; ordering violations {violations}")
    return ok


def check_thermal():
    print("\n9. Thermal Identities")
    beta = 1.3
    cases = (
        ('single spin', single_spin_model(b=0.4)),
        ('transverse chain', build_heisenberg_chain(3, 1.0, transverse=0.3, b=0.2)),
    )
    worst = 0.0
    for _, model in cases:
        dbeta, dbeta_fd = metric_dbeta(model, beta), metric_dbeta_fd(model, beta)
        db, (db_fd, _, _) = metric_db(model, beta), metric_db_fd(model, beta)
        worst = max(worst, abs(dbeta_fd - dbeta) / dbeta, abs(db_fd - db) / db)
    commuting = susceptibilities(build_heisenberg_chain(3, 1.0, b=0.3), beta)
    chi_f = float(np.max(np.abs(commuting.chi_F)))
    ok = worst < 1e-5 and chi_f < 1e-12
    print(f"   {mark(ok)} max relative error {worst:.2e}; commuting chi_F {chi_f:.1e}")
    return ok


def check_determinism(seed):
    print("\n10. CLI Determinism")
    runner = CliRunner()
    with tempfile.TemporaryDirectory() as tmp:
        config = Path(tmp) / 'bures.json'
        config.write_text(json.dumps({'fuzz': {'count': 20, 'dim_min': 2, 'dim_max': 4}}))
        runs = [runner.invoke(cli, ['--seed', str(seed), 'bures', '--config', str(config)]) for _ in range(2)]
    ok = all(run.exit_code == 0 for run in runs) and runs[0].stdout == runs[1].stdout
    print(f"   {mark(ok)} identical output across runs: {runs[0].stdout == runs[1].stdout}")
    return ok


def validate_identities():
    """Run every identity check; True when all pass."""
    print("=" * 60)
    print("SPECTRAL METRIC IDENTITY VALIDATION")
    print("=" * 60 + "\n")

    seed = get_settings().seed
    rng = make_rng(seed)
    print(f"Seed: {seed}\n")

    results = [
        check_minimization(rng),
        check_differential_split(),
        check_dispersion_speed(rng),
        check_dispersion_inequality(rng),
        check_uncertainty_chain(rng),
        check_interferometry(rng),
        check_geodesics(rng),
        check_bures(rng),
        check_thermal(),
        check_determinism(seed),
    ]

    print("\n" + "=" * 60)
    if all(results):
        print("✓ ALL IDENTITY CHECKS PASSED")
    else:
        print(f"⚠️  {results.count(False)} of {len(results)} CHECKS FAILED")
    print("=" * 60)
    return all(results)


if __name__ == '__main__':
    success = validate_identities()
    sys.exit(0 if success else 1)
