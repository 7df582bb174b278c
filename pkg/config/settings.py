import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

# --- Paths ---
PROJECT_ROOT = Path(__file__).resolve().parent.parent
FRAMEWORKS_DIR = Path(os.getenv("APRIV_FRAMEWORKS_DIR", str(PROJECT_ROOT / "config" / "frameworks")))

# --- Numeric tolerances ---
PROBABILITY_TOLERANCE = float(os.getenv("APRIV_PROBABILITY_TOLERANCE", "1e-9"))
CUMULATIVE_TOLERANCE = float(os.getenv("APRIV_CUMULATIVE_TOLERANCE", "1e-12"))
SYMMETRY_TOLERANCE = float(os.getenv("APRIV_SYMMETRY_TOLERANCE", "1e-12"))
PSD_TOLERANCE = float(os.getenv("APRIV_PSD_TOLERANCE", "1e-9"))

# --- Mechanism defaults ---
DEFAULT_MAX_QUILT_SIZE = int(os.getenv("APRIV_MAX_QUILT_SIZE", "3"))
DEFAULT_BINS = int(os.getenv("APRIV_BINS", "64"))
DEFAULT_GRID_STEP = float(os.getenv("APRIV_GRID_STEP", "0.05"))
DEFAULT_BETA = float(os.getenv("APRIV_BETA", "0.05"))

# Gaussian approximations are binned over mean +/- this many standard deviations
GAUSSIAN_WINDOW_SDS = float(os.getenv("APRIV_GAUSSIAN_WINDOW_SDS", "6"))

# Above this many configuration bits, inference switches from the full joint table
# to variable elimination
MAX_JOINT_BITS = int(os.getenv("APRIV_MAX_JOINT_BITS", "20"))

# --- Logging ---
LOG_LEVEL = os.getenv("APRIV_LOG_LEVEL", "INFO")
