"""Incremental sieve over squared primes in eight variants.

V0 is the plain window sieve; V1..V7 keep, for every p**2, the next multiple
above the current position and add progressively cheaper ways to skip
positions that cannot lie in a long enough run.
"""

from .kernels import MAXRUN
from .search import RunStats, SearchResult, first_occurrences, search
from .state import VARIANTS, Event, SieveState, VariantError, init_state, prime_bound, split_sizes

__all__ = [
    "MAXRUN", "VARIANTS", "Event", "RunStats", "SearchResult", "SieveState",
    "VariantError", "first_occurrences", "init_state", "prime_bound", "search",
    "split_sizes",
]
