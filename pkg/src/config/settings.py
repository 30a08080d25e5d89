"""
Configuration settings and constants for nhqsim.

Units are fixed throughout: hbar = 1, rates and energies in rad/us, times in us.
"""
import os
from typing import Optional

# Load environment variables
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

# System size
N_MAX: int = int(os.getenv('NHQSIM_N_MAX', '10'))

# Output
DEFAULT_OUTPUT_DIR: str = 'output'
OUTPUT_DIR_ENV: str = 'NHQSIM_OUT'
OUTPUT_PRECISION: int = int(os.getenv('NHQSIM_PRECISION', '17'))
DEFAULT_THREADS: int = int(os.getenv('NHQSIM_THREADS', str(os.cpu_count() or 1)))
LOG_LEVEL: str = os.getenv('NHQSIM_LOG_LEVEL', 'WARNING').upper()

# Spectral analysis
DEFAULT_EIG_TOL: float = 1e-6
DEFAULT_VEC_TOL: float = 1e-3
DEFECTIVE_CONDITION: float = 1e12   # right-eigenvector condition number flagged defective-adjacent
MODAL_CONDITION_LIMIT: float = 1e8  # modal propagation refused above this

# Entanglement measures
DENSITY_EIG_TOL: float = 1e-10
TANGLE_CLAMP_LOG_TOL: float = 1e-8

# Run configuration
SCHEMA_VERSION: int = 1
UNITS = {
    'omega': 'rad/us',
    'delta': 'rad/us',
    'gamma': 'rad/us',
    'coupling': 'rad/us',
    'time': 'us',
}


def validate_settings() -> None:
    """Validate environment-provided settings."""
    if not 1 <= N_MAX <= 14:
        raise ValueError(f"NHQSIM_N_MAX must be between 1 and 14, got {N_MAX}")
    if not 1 <= OUTPUT_PRECISION <= 17:
        raise ValueError(f"NHQSIM_PRECISION must be between 1 and 17, got {OUTPUT_PRECISION}")
    if DEFAULT_THREADS < 1:
        raise ValueError(f"NHQSIM_THREADS must be positive, got {DEFAULT_THREADS}")


def output_dir_override() -> Optional[str]:
    """Output directory forced by the environment, read at call time."""
    return os.getenv(OUTPUT_DIR_ENV) or None
