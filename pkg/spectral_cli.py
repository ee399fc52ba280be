"""
Spectral Geometry CLI

Usage:
    python spectral_cli.py [--tol X] [--seed N] COMMAND --config PATH [--out PATH]

Commands: metric-path, geodesic, bures, interfere, thermal-scan.
CSV goes to --out (default stdout); progress and summaries go to stderr.

Exit status: 0 success, 2 invalid input or configuration, 3 numerical failure.
"""

import sys

import click

from geometry_errors import GeometryError
from geometry_processor import PROCESSORS, write_csv
from run_config import load_config
from settings import get_settings


def run_command(ctx, command, config_path, out):
    """Load the config, run the command's processor and write its table."""
    try:
        config = load_config(config_path, command)
        processor = PROCESSORS[command](config, ctx.obj)
        df = processor.process()
        write_csv(df, out)
        processor.print_summary()
    except GeometryError as e:
        click.echo(f"❌ {type(e).__name__}: {e}", err=True)
        sys.exit(e.exit_code)
    if out is not None:
        click.echo(f"✓ Wrote {out}", err=True)


def command_options(func):
    func = click.option('--out', type=click.Path(dir_okay=False), default=None,
                        help='CSV output path (default: stdout)')(func)
    func = click.option('--config', 'config_path', required=True,
                        type=click.Path(exists=True, dir_okay=False),
                        help='JSON run configuration')(func)
    return func


@click.group()
@click.option('--tol', type=float, default=None, help='Validation tolerance (default SPECTRAL_TOL or 1e-9)')
@click.option('--seed', type=int, default=None, help='Seed for fuzz modes (default SPECTRAL_SEED or 2025)')
@click.pass_context
def cli(ctx, tol, seed):
    """Spectral-decomposition metric toolkit."""
    try:
        ctx.obj = get_settings().override(tol=tol, seed=seed)
    except GeometryError as e:
        click.echo(f"❌ {type(e).__name__}: {e}", err=True)
        sys.exit(e.exit_code)


@cli.command('metric-path')
@command_options
@click.pass_context
def metric_path(ctx, config_path, out):
    """Discrete and differential line element along a path."""
    run_command(ctx, 'metric-path', config_path, out)


@cli.command('geodesic')
@command_options
@click.pass_context
def geodesic(ctx, config_path, out):
    """Qubit geodesic curves (or the figure preset) with their lengths."""
    run_command(ctx, 'geodesic', config_path, out)


@cli.command('bures')
@command_options
@click.pass_context
def bures(ctx, config_path, out):
    """Bures element by two routes against the spectral line element."""
    run_command(ctx, 'bures', config_path, out)


@cli.command('interfere')
@command_options
@click.pass_context
def interfere(ctx, config_path, out):
    """Interferometric estimate of the line element."""
    run_command(ctx, 'interfere', config_path, out)


@cli.command('thermal-scan')
@command_options
@click.pass_context
def thermal_scan(ctx, config_path, out):
    """Thermal metric coefficients over a (beta, b) grid."""
    run_command(ctx, 'thermal-scan', config_path, out)


if __name__ == "__main__":
    cli()
