"""Long runs of consecutive non-square-free integers."""

from .oracle import GapRecord, PrimeTable, is_squarefree, mobius, verify_run

__version__ = "0.1.0"

__all__ = ["GapRecord", "PrimeTable", "is_squarefree", "mobius", "verify_run", "__version__"]
