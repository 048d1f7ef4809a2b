"""Load configuration from environment (e.g. .env). Every knob has a safe default."""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load .env from project root (parent of src)
_env_path = Path(__file__).resolve().parents[2] / ".env"
load_dotenv(_env_path)

# Exhaustive enumeration (encodings, extremal points, local strategies)
ENUMERATION_BUDGET = int(os.getenv("OC_ENUMERATION_BUDGET", "100000000"))
ENUMERATION_BATCH = int(os.getenv("OC_ENUMERATION_BATCH", "65536"))
# Batches are scored on a thread pool of this width; 1 = sequential
ENUMERATION_WORKERS = int(os.getenv("OC_ENUMERATION_WORKERS", "1"))

# Tolerances
STATE_TOL = float(os.getenv("OC_STATE_TOL", "1e-9"))  # Hermitian / PSD / trace checks
PRIOR_TOL = float(os.getenv("OC_PRIOR_TOL", "1e-12"))  # priors and stochastic rows
OBLIVIOUS_TOL = float(os.getenv("OC_OBLIVIOUS_TOL", "1e-9"))  # operator norm
LP_TOL = float(os.getenv("OC_LP_TOL", "1e-9"))
REPLAY_TOL = float(os.getenv("OC_REPLAY_TOL", "1e-8"))
# Collapse branches lighter than this are treated as impossible
ZERO_PROBABILITY = 1e-12
# Ties in argmax decoding are resolved to the lowest index within this slack
TIE_TOL = 1e-12

# Sampled oblivious lower bound
SAMPLES = int(os.getenv("OC_SAMPLES", "1000"))
SEED = int(os.getenv("OC_SEED", "12345"))

SCHEMA_VERSION = "v1"
