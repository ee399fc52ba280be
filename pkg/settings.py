"""
Configuration defaults for the spectral geometry toolkit.

Values come from environment variables (a local .env file is honoured) and fall
back to the defaults below. Library functions take these as keyword defaults;
only the CLI and the validation script read the environment.
"""

import os
from dataclasses import dataclass, replace

from dotenv import load_dotenv

from geometry_errors import ConfigError

# Load environment variables
load_dotenv()

DEFAULT_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-12
DEFAULT_DEGENERACY_TOL = 1e-9
DEFAULT_AMBIGUITY_TOL = 1e-6
DEFAULT_SEED = 2025
DEFAULT_FD_STEP = 1e-4


@dataclass(frozen=True)
class Settings:
    tol: float = DEFAULT_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    degeneracy_tol: float = DEFAULT_DEGENERACY_TOL
    ambiguity_tol: float = DEFAULT_AMBIGUITY_TOL
    seed: int = DEFAULT_SEED
    fd_step: float = DEFAULT_FD_STEP

    def override(self, **values):
        """Return a copy with the non-None values replaced and re-validated."""
        changes = {key: value for key, value in values.items() if value is not None}
        updated = replace(self, **changes)
        for name in ('tol', 'rank_tol', 'degeneracy_tol', 'ambiguity_tol', 'fd_step'):
            _require_positive(name, getattr(updated, name))
        return updated


def _require_positive(name, value):
    if not value > 0:
        raise ConfigError(f"{name} must be positive, got {value!r}")


def _read_float(env_name, default):
    raw = os.environ.get(env_name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{env_name} must be a number, got {raw!r}") from None
    _require_positive(env_name, value)
    return value


def _read_int(env_name, default):
    raw = os.environ.get(env_name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{env_name} must be an integer, got {raw!r}") from None


def get_settings() -> Settings:
    """Build Settings from SPECTRAL_* environment variables."""
    return Settings(
        tol=_read_float("SPECTRAL_TOL", DEFAULT_TOL),
        rank_tol=_read_float("SPECTRAL_RANK_TOL", DEFAULT_RANK_TOL),
        degeneracy_tol=_read_float("SPECTRAL_DEGENERACY_TOL", DEFAULT_DEGENERACY_TOL),
        ambiguity_tol=_read_float("SPECTRAL_AMBIGUITY_TOL", DEFAULT_AMBIGUITY_TOL),
        seed=_read_int("SPECTRAL_SEED", DEFAULT_SEED),
        fd_step=_read_float("SPECTRAL_FD_STEP", DEFAULT_FD_STEP),
    )
