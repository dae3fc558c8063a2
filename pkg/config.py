import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# ---------- Output locations ----------
# Traces, reports and series CSVs land here unless a spec names its own path.
OUTPUT_DIR = Path(os.getenv("HMC_OUTPUT_DIR", str(Path.cwd() / "runs")))

# ---------- Sampling defaults ----------
DEFAULT_SEED = int(os.getenv("HMC_DEFAULT_SEED", "1"))
SHOW_PROGRESS = os.getenv("HMC_PROGRESS", "false").lower() == "true"

# ---------- Diagnostics ----------
BURNIN_WINDOW = int(os.getenv("HMC_BURNIN_WINDOW", "50"))
BURNIN_BAND = float(os.getenv("HMC_BURNIN_BAND", "2.0"))
MODE_RADIUS = float(os.getenv("HMC_MODE_RADIUS", "3.0"))
HIST_BINS = int(os.getenv("HMC_HIST_BINS", "50"))
ACF_MAX_LAG = int(os.getenv("HMC_ACF_MAX_LAG", "100"))
STORM_WINDOW = int(os.getenv("HMC_STORM_WINDOW", "1000"))

# ---------- Finite differences ----------
FD_STEP = float(os.getenv("HMC_FD_STEP", "1e-5"))
SYMPLECTIC_FD_STEP = float(os.getenv("HMC_SYMPLECTIC_FD_STEP", "1e-6"))

# ---------- Logging ----------
LOG_LEVEL = os.getenv("HMC_LOG_LEVEL", "WARNING").upper()

APP_TITLE = "HMC Bench - Hamiltonian Monte Carlo toolkit and sampler benchmark"
