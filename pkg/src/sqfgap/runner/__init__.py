"""Work units, checkpoints, ledgers and parallel execution."""

from .checkpoint import Checkpoint, CheckpointError, Interrupted, run_unit
from .ledger import Ledger, LedgerConflict, WorkUnit, merge_ledgers, records_digest
from .parallel import run_range, split_range

__all__ = [
    "Checkpoint", "CheckpointError", "Interrupted", "Ledger", "LedgerConflict",
    "WorkUnit", "merge_ledgers", "records_digest", "run_range", "run_unit", "split_range",
]
