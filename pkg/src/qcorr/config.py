import os
from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("QCORR_LOG_LEVEL", "WARNING")
ENTROPY_UNIT = os.getenv("QCORR_ENTROPY_UNIT", "bits")
RESTARTS = int(os.getenv("QCORR_RESTARTS", 64))
MAX_ITERS = int(os.getenv("QCORR_MAX_ITERS", 2000))
WORKERS = int(os.getenv("QCORR_WORKERS", os.cpu_count() or 1))
