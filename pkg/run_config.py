"""
JSON run configurations for the CLI.

Matrices are written as {"dim": d, "real": [...], "imag": [...]}, with the
arrays either nested (d rows of d numbers) or flat row-major; "imag" may be
omitted. Grids are {"start": a, "stop": b, "points": n}.

metric-path:
    {"family": "unitary", "rho0": MATRIX, "H": MATRIX, "grid": GRID}
    {"family": "tabulated", "times": [...], "states": [MATRIX, ...]}
geodesic:
    {"preset": "figure2"}
    {"r1": .., "r2": .., "theta12": .., "samples": 200, "n_points": 401}
    (n_points is the solver grid; it defaults to samples)
bures:
    {"pairs": [{"rho": MATRIX, "sigma": MATRIX}, ...],
     "fuzz": {"count": 500, "dim_min": 2, "dim_max": 6}}
interfere:
    {"rho": MATRIX, "H": MATRIX, "delta_t": dt, "phases": [...],
     "delta_p": [...], "epsilon": eps}
thermal-scan:
    {"preset": "single_spin" | "heisenberg" | "transverse", "n": 3, "J": 1.0,
     "transverse": 0.3, "betas": GRID | [...], "fields": GRID | [...], "fd_step": 1e-4}

Optional tolerances on every command: rank_tol, degeneracy_tol, ambiguity_tol.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from geometry_errors import ConfigError, NotHermitian
from hermitian_core import is_hermitian
from settings import get_settings

NUMBER = {'type': 'number'}
POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
NUMBER_ARRAY = {
    'type': 'array',
    'items': {'anyOf': [NUMBER, {'type': 'array', 'items': NUMBER}]},
}
MATRIX_SCHEMA = {
    'type': 'object',
    'required': ['dim', 'real'],
    'properties': {
        'dim': {'type': 'integer', 'minimum': 1},
        'real': NUMBER_ARRAY,
        'imag': NUMBER_ARRAY,
    },
}
GRID_SCHEMA = {
    'type': 'object',
    'required': ['start', 'stop', 'points'],
    'properties': {
        'start': NUMBER,
        'stop': NUMBER,
        'points': {'type': 'integer', 'minimum': 2},
    },
}
VALUES_SCHEMA = {'anyOf': [GRID_SCHEMA, {'type': 'array', 'items': NUMBER, 'minItems': 1}]}
TOLERANCES = {
    'rank_tol': POSITIVE,
    'degeneracy_tol': POSITIVE,
    'ambiguity_tol': POSITIVE,
}

SCHEMAS = {
    'metric-path': {
        'type': 'object',
        'required': ['family'],
        'properties': {
            'family': {'enum': ['unitary', 'tabulated']},
            'rho0': MATRIX_SCHEMA,
            'H': MATRIX_SCHEMA,
            'grid': GRID_SCHEMA,
            'times': {'type': 'array', 'items': NUMBER},
            'states': {'type': 'array', 'items': MATRIX_SCHEMA},
            **TOLERANCES,
        },
    },
    'geodesic': {
        'type': 'object',
        'properties': {
            'preset': {'enum': ['figure2']},
            'r1': NUMBER,
            'r2': NUMBER,
            'theta12': NUMBER,
            'samples': {'type': 'integer', 'minimum': 2},
            'n_points': {'type': 'integer', 'minimum': 3},
        },
    },
    'bures': {
        'type': 'object',
        'properties': {
            'pairs': {
                'type': 'array',
                'items': {
                    'type': 'object',
                    'required': ['rho', 'sigma'],
                    'properties': {'rho': MATRIX_SCHEMA, 'sigma': MATRIX_SCHEMA},
                },
            },
            'fuzz': {
                'type': 'object',
                'properties': {
                    'count': {'type': 'integer', 'minimum': 1},
                    'dim_min': {'type': 'integer', 'minimum': 2},
                    'dim_max': {'type': 'integer', 'minimum': 2},
                },
            },
            **TOLERANCES,
        },
    },
    'interfere': {
        'type': 'object',
        'required': ['rho', 'H', 'delta_t'],
        'properties': {
            'rho': MATRIX_SCHEMA,
            'H': MATRIX_SCHEMA,
            'delta_t': {'type': 'number', 'minimum': 0},
            'phases': {'type': 'array', 'items': NUMBER},
            'delta_p': {'type': 'array', 'items': NUMBER},
            'epsilon': POSITIVE,
            **TOLERANCES,
        },
    },
    'thermal-scan': {
        'type': 'object',
        'required': ['preset', 'betas', 'fields'],
        'properties': {
            'preset': {'enum': ['single_spin', 'heisenberg', 'transverse']},
            'n': {'type': 'integer'},
            'J': NUMBER,
            'transverse': NUMBER,
            'betas': VALUES_SCHEMA,
            'fields': VALUES_SCHEMA,
            'fd_step': POSITIVE,
            **TOLERANCES,
        },
    },
}


@dataclass
class RunConfig:
    """A validated command configuration plus the tolerances it runs with."""
    command: str
    params: dict
    tolerances: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)


def parse_matrix(spec, hermitian=False, tol=None, name='matrix'):
    """
    Build a complex matrix from {dim, real, imag}.

    Raises:
        ConfigError: the arrays do not hold dim x dim numbers
        NotHermitian: hermitian=True and the matrix is not Hermitian
    """
    dim = spec['dim']
    try:
        real = np.asarray(spec['real'], dtype=float).reshape(dim, dim)
        imag = np.asarray(spec.get('imag', np.zeros(dim * dim)), dtype=float).reshape(dim, dim)
    except ValueError as e:
        raise ConfigError(f"{name}: cannot read a {dim}x{dim} matrix ({e})") from e
    matrix = real + 1j * imag
    tol = get_settings().tol if tol is None else tol
    if hermitian and not is_hermitian(matrix, tol):
        raise NotHermitian(f"{name} must be Hermitian")
    return matrix


def parse_grid(spec):
    """np.linspace(start, stop, points) with start < stop."""
    if not spec['stop'] > spec['start']:
        raise ConfigError(f"grid stop {spec['stop']!r} must exceed start {spec['start']!r}")
    return np.linspace(spec['start'], spec['stop'], spec['points'])


def parse_values(spec):
    """A grid object or an explicit list of numbers."""
    if isinstance(spec, dict):
        return parse_grid(spec)
    return np.asarray(spec, dtype=float)


def load_config(path, command):
    """
    Read and validate the JSON configuration for one command.

    Tolerances missing from the file fall back to the environment settings.
    """
    path = Path(path)
    try:
        params = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path.name} is not valid JSON: {e}") from e
    return build_config(params, command)


def build_config(params, command):
    if command not in SCHEMAS:
        raise ConfigError(f"unknown command {command!r}")
    try:
        jsonschema.validate(params, SCHEMAS[command])
    except jsonschema.ValidationError as e:
        location = '/'.join(str(p) for p in e.absolute_path) or '<root>'
        raise ConfigError(f"{command} config invalid at {location}: {e.message}") from e

    settings = get_settings()
    tolerances = {
        'rank_tol': params.get('rank_tol', settings.rank_tol),
        'degeneracy_tol': params.get('degeneracy_tol', settings.degeneracy_tol),
        'ambiguity_tol': params.get('ambiguity_tol', settings.ambiguity_tol),
    }
    return RunConfig(command=command, params=params, tolerances=tolerances)
