"""
Runtime configuration for the spectral gap toolkit.

Every default can be overridden from the environment, e.g.

    GAP_STURM_N=8000 GAP_SEED=7 python cli.py bound --body ball --dim 4
"""

import logging
import os
import sys
from typing import Any, Dict, Optional


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be an integer, got {value!r}")


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if value is None or value.strip() == '':
        return default
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"Environment variable {name} must be a number, got {value!r}")


# Node count of the 1D Sturm-Liouville meshes (the 2n mesh is also solved)
STURM_N = _env_int('GAP_STURM_N', 4000)

# Radial grid points and boundary samples of the weight certificate engine
GRID_N = _env_int('GAP_GRID_N', 4096)
BOUNDARY_SAMPLES = _env_int('GAP_BOUNDARY_SAMPLES', 4096)

# Monte Carlo sample count (volumes, Galerkin moments) and the base seed
MC_SAMPLES = _env_int('GAP_MC_SAMPLES', 200000)
SEED = _env_int('GAP_SEED', 0)

GALERKIN_DEGREE = _env_int('GAP_GALERKIN_DEGREE', 7)

# A certified lower bound may exceed a numeric reference by at most this much
SANDWICH_TOL = _env_float('GAP_SANDWICH_TOL', 1e-6)

# Exact closed forms and discretized references must agree to this relative accuracy
EXACT_REL_TOL = _env_float('GAP_EXACT_REL_TOL', 1e-4)

LOG_LEVEL = os.getenv('GAP_LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('GAP_LOG_FILE')

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

DEFAULTS: Dict[str, Any] = {
    'sturm_n': STURM_N,
    'grid_n': GRID_N,
    'boundary_samples': BOUNDARY_SAMPLES,
    'mc_samples': MC_SAMPLES,
    'seed': SEED,
    'degree': GALERKIN_DEGREE,
    'sandwich_tol': SANDWICH_TOL,
    'exact_rel_tol': EXACT_REL_TOL,
}


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """
    Install console (stderr) and optional file handlers on the root logger.

    Args:
        level: Logging level name, defaults to GAP_LOG_LEVEL
        log_file: Optional log file path, defaults to GAP_LOG_FILE
    """
    level = (level or LOG_LEVEL).upper()
    log_file = log_file if log_file is not None else LOG_FILE

    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
