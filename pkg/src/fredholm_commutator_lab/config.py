import os
from dotenv import load_dotenv

# --- PATH CONFIGURATION ---
SCRIPT_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(os.path.dirname(SCRIPT_DIR))

DATA_DIR = os.path.join(PROJECT_ROOT, "data")
RUNS_DIR = os.path.join(DATA_DIR, "runs")

load_dotenv(os.path.join(PROJECT_ROOT, ".env"))

# FCL_DEFAULT_OUT wins over the timestamped folder under data/runs
DEFAULT_OUT_DIR = os.getenv("FCL_DEFAULT_OUT")
LOG_LEVEL = os.getenv("FCL_LOG_LEVEL", "WARNING")


def _env_float(name, default):
    raw = os.getenv(name)
    return float(raw) if raw else default


# --- TOLERANCES ---
# some kernels scale these by the matrix dimension
KERNEL_TOLERANCE = _env_float("FCL_KERNEL_TOLERANCE", 1e-10)
NORMALITY_TOLERANCE = _env_float("FCL_NORMALITY_TOLERANCE", 1e-8)
PIVOT_TOLERANCE = _env_float("FCL_PIVOT_TOLERANCE", 1e-14)
LOG_ZERO_TOLERANCE = 1e-12
BRANCH_CUT_TOLERANCE = 1e-8
BOUNDARY_TOLERANCE = 1e-8
LATTICE_TOLERANCE = 1e-6

SEQUENCE_TOLERANCE = _env_float("FCL_SEQUENCE_TOLERANCE", 1e-6)
GRID_TOLERANCE = _env_float("FCL_GRID_TOLERANCE", 1e-4)
# plateau: consecutive windows agreeing within this fraction of 2*pi
PLATEAU_WIDTH = _env_float("FCL_PLATEAU_WIDTH", 0.05)
PLATEAU_MIN_POINTS = 3
INTERESTING_FACTOR = 100.0

# --- DEFAULT SCHEDULES ---
DEFAULT_AMBIENT = 400
DEFAULT_SCHEDULE = (10, 20, 40, 80, 120)
DEFAULT_GRID_LENGTH = 40.0
DEFAULT_GRID_POINTS = 1024
DEFAULT_WINDOWS = (64, 128, 256, 384)
DEFAULT_DELTA_SWEEP = (0.5, 0.25, 0.1)
DEFAULT_DECAY = 0.5
DEFAULT_SEED = 42

RNG_ALGORITHM = "numpy.PCG64"
