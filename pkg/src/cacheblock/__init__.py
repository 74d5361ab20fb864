"""Chunked state-vector simulation with cache-blocking transpilation."""

from .chunks import (
    ChunkedState,
    GateClass,
    Mode,
    SpaceConfig,
    TransferLedger,
    execute,
    gather,
    partition,
)
from .circuit import Circuit, Gate, GateKind
from .dense import DenseState
from .transpiler import TranspileResult, cache_block, verify_blocked

__version__ = "0.1.0"

__all__ = [
    "ChunkedState", "Circuit", "DenseState", "Gate", "GateClass", "GateKind", "Mode",
    "SpaceConfig", "TransferLedger", "TranspileResult", "cache_block", "execute",
    "gather", "partition", "verify_blocked",
]
