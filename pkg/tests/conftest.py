import os

# keep the threading layer warning-free and portable in CI containers
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
