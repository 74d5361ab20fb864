"""Chunk-partitioned state vector over modeled memory spaces.

The state is split into ``2**(n-nc)`` chunks of ``2**nc`` amplitudes.
Chunks are dealt to ``num_spaces`` memory spaces contiguously (the high
chunk-index bits select the space). Inside a space, chunks live in a fast
tier up to its capacity and in a slow tier beyond it. Every chunk that
crosses a space boundary, and every slow/fast tier copy, is counted in a
:class:`TransferLedger`.
"""

from __future__ import annotations

import enum
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .dense import DenseState, check_capacity, kernel_gate
from .errors import CapacityError, ConfigurationError, MalformedCircuitError

AMPLITUDE_BYTES = 16


class Tier(enum.Enum):
    FAST = "fast"
    SLOW = "slow"


class GateClass(enum.Enum):
    LOCAL = "local"
    CROSS_CHUNK_SAME_SPACE = "cross_chunk_same_space"
    CROSS_SPACE = "cross_space"


class Mode(enum.Enum):
    BASELINE = "baseline"
    BLOCKED = "blocked"


@dataclass(frozen=True)
class SpaceConfig:
    """``fast_capacity`` is in chunks per space; None means every chunk is fast.

    When a space holds more chunks than its fast capacity, one fast slot is
    kept free as the staging slot that slow chunks are fetched into, so
    ``fast_capacity - 1`` chunks stay resident in the fast tier.
    """

    num_spaces: int = 1
    fast_capacity: int | None = None


@dataclass(frozen=True)
class LedgerEntry:
    index: int
    gate: str
    inter_space_sends: int = 0
    tier_fetches: int = 0
    tier_evictions: int = 0


@dataclass
class TransferLedger:
    chunk_bytes: int
    inter_space_sends: int = 0
    inter_space_bytes: int = 0
    tier_fetches: int = 0
    tier_evictions: int = 0
    breakdown: list[LedgerEntry] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def record(self, index: int, gate: str, sends: int = 0, fetches: int = 0,
               evictions: int = 0):
        with self._lock:
            self.inter_space_sends += sends
            self.inter_space_bytes += sends * self.chunk_bytes
            self.tier_fetches += fetches
            self.tier_evictions += evictions
            self.breakdown.append(LedgerEntry(index, gate, sends, fetches, evictions))

    def totals(self) -> dict[str, int]:
        return {
            "inter_space_sends": self.inter_space_sends,
            "inter_space_bytes": self.inter_space_bytes,
            "tier_fetches": self.tier_fetches,
            "tier_evictions": self.tier_evictions,
        }


class ChunkedState:
    def __init__(self, n: int, nc: int, cfg: SpaceConfig):
        check_capacity(n)
        if not 0 < nc <= n:
            raise ConfigurationError(f"chunk qubits must be in [1, {n}], got {nc}")
        m = cfg.num_spaces
        if m < 1 or m & (m - 1):
            raise ConfigurationError(f"number of spaces must be a power of two, got {m}")
        num_chunks = 1 << (n - nc)
        if m > num_chunks:
            raise ConfigurationError(
                f"{m} spaces cannot share {num_chunks} chunk(s) evenly"
            )
        per_space = num_chunks // m
        fast = cfg.fast_capacity
        if fast is not None and fast < per_space and fast < 1:
            raise ConfigurationError(
                "a space with slow-tier chunks needs fast_capacity >= 1 for the staging slot"
            )

        self.n = n
        self.nc = nc
        self.cfg = cfg
        self.space_bits = m.bit_length() - 1
        self.chunks_per_space = per_space
        self.chunks = np.zeros((num_chunks, 1 << nc), dtype=np.complex128)
        self.chunks[0, 0] = 1.0

        resident = per_space if fast is None or fast >= per_space else fast - 1
        self.placement: list[tuple[int, Tier]] = [
            (self.space_of(c), Tier.FAST if c % per_space < resident else Tier.SLOW)
            for c in range(num_chunks)
        ]
        self._slow = np.array([t is Tier.SLOW for _, t in self.placement])
        self._space = [s for s, _ in self.placement]

        self._buffers = [np.empty(1 << nc, dtype=np.complex128) for _ in range(m)]
        self._buffers_in_use = [0] * m
        self.buffer_peak = [0] * m
        self.ledger = TransferLedger(self.chunk_bytes)

    @property
    def num_chunks(self) -> int:
        return self.chunks.shape[0]

    @property
    def chunk_bytes(self) -> int:
        return AMPLITUDE_BYTES << self.nc

    @property
    def slow_chunks(self) -> int:
        return int(self._slow.sum())

    def space_of(self, c: int) -> int:
        return c >> (self.n - self.nc - self.space_bits)

    def acquire_buffer(self, space: int) -> np.ndarray:
        """Borrow the space's single exchange buffer; pair with release_buffer."""
        in_use = self._buffers_in_use[space] + 1
        if in_use > self.buffer_peak[space]:
            self.buffer_peak[space] = in_use
        if in_use > 1:
            raise RuntimeError(f"space {space} needs a second exchange buffer")
        self._buffers_in_use[space] = in_use
        return self._buffers[space]

    def release_buffer(self, space: int):
        self._buffers_in_use[space] -= 1

    @contextmanager
    def exchange_buffer(self, space: int):
        buf = self.acquire_buffer(space)
        try:
            yield buf
        finally:
            self.release_buffer(space)


def partition(n: int, nc: int, cfg: SpaceConfig | None = None) -> ChunkedState:
    return ChunkedState(n, nc, cfg or SpaceConfig())


def gather(state: ChunkedState) -> DenseState:
    if state.n > 30:
        raise CapacityError(f"cannot gather {state.n} qubits")
    return DenseState(state.n, state.chunks.reshape(-1).copy())


def classify_gate_qubit(k: int, state: ChunkedState) -> GateClass:
    if k < state.nc:
        return GateClass.LOCAL
    if k - state.nc < (state.n - state.nc) - state.space_bits:
        return GateClass.CROSS_CHUNK_SAME_SPACE
    return GateClass.CROSS_SPACE


def _label(g: Gate) -> str:
    return g.name or g.kind.value


def apply_local_gate(state: ChunkedState, g: Gate, index: int = -1):
    """Run ``g`` independently inside every chunk."""
    if g.kind is GateKind.DIAGONAL:
        apply_diagonal_gate(state, g, index)
        return
    if g.is_marker:
        raise ValueError(f"{g.kind.value} is not a local gate")
    if any(q >= state.nc for q in g.qubits):
        raise ValueError(f"{g!r} touches a qubit >= nc={state.nc}")
    kernel_gate(state.chunks, g)
    state.ledger.record(index, _label(g))


def _chunk_offsets(state: ChunkedState) -> np.ndarray:
    return (np.arange(state.num_chunks, dtype=np.int64) << state.nc)[:, None]


def apply_diagonal_gate(state: ChunkedState, d: Gate, index: int = -1):
    """Phase every amplitude from its (chunk index, local index); never moves data."""
    if d.kind is not GateKind.DIAGONAL:
        raise ValueError("apply_diagonal_gate needs a diagonal gate")
    kernel_gate(state.chunks, d, _chunk_offsets(state))
    state.ledger.record(index, _label(d))


def _chunk_pairs(state: ChunkedState, bit: int) -> list[tuple[int, int]]:
    step = 1 << bit
    return [(c, c | step) for c in range(state.num_chunks) if not c & step]


def apply_chunk_swap(state: ChunkedState, sq0: int, sq1: int, index: int = -1,
                     label: str = "chunk_swap"):
    """Swap qubits ``sq0 < sq1`` where ``sq1`` indexes chunks.

    With ``sq0 < nc`` half of each chunk pair is exchanged; with both
    qubits above ``nc`` whole chunks are exchanged. A pair split across two
    spaces costs one send each way.
    """
    nc = state.nc
    if not sq0 < sq1:
        raise ValueError(f"chunk_swap needs sq0 < sq1, got ({sq0}, {sq1})")
    if sq1 < nc:
        raise ValueError(f"chunk_swap({sq0}, {sq1}) is local to a chunk (nc={nc})")
    if sq1 >= state.n:
        raise ValueError(f"qubit {sq1} out of range")

    chunks = state.chunks
    if sq0 < nc:
        local = np.arange(1 << nc)
        lo_part = local[(local >> sq0) & 1 == 1]
        hi_part = lo_part ^ (1 << sq0)
        pairs = _chunk_pairs(state, sq1 - nc)
    else:
        lo_part = hi_part = slice(None)
        b0, b1 = 1 << (sq0 - nc), 1 << (sq1 - nc)
        pairs = ((c, c ^ b0 ^ b1) for c in range(state.num_chunks) if c & b0 and not c & b1)

    space = state._space
    sends = 0
    for a, b in pairs:
        sa, sb = space[a], space[b]
        if sa != sb:
            # each side receives the partner chunk into its own buffer
            buf_a = state.acquire_buffer(sa)
            buf_b = state.acquire_buffer(sb)
            buf_a[:] = chunks[b]
            buf_b[:] = chunks[a]
            chunks[a, lo_part] = buf_a[hi_part]
            chunks[b, hi_part] = buf_b[lo_part]
            state.release_buffer(sb)
            state.release_buffer(sa)
            sends += 2
        else:
            buf = state.acquire_buffer(sa)
            buf[:] = chunks[b]
            chunks[b, hi_part] = chunks[a, lo_part]
            chunks[a, lo_part] = buf[hi_part]
            state.release_buffer(sa)
    state.ledger.record(index, label, sends=sends)


def apply_cross_gate_baseline(state: ChunkedState, g: Gate, index: int = -1):
    """Apply a gate reaching above ``nc`` by pairwise chunk exchange.

    For each chunk pair the upper chunk is copied into the lower chunk's
    space buffer, the gate runs over the two chunks as one ``nc+1`` qubit
    block, and the upper half is written back. A gate whose two qubits
    both index chunks is bracketed by chunk swaps that bring one of them
    down to a local qubit.
    """
    nc = state.nc
    if g.is_marker or g.kind is GateKind.DIAGONAL:
        raise ValueError(f"{g!r} is not a cross-chunk computational gate")
    high = [q for q in g.qubits if q >= nc]
    if not high:
        raise ValueError(f"{g!r} is local; use apply_local_gate")
    label = _label(g)

    if len(high) == 2:
        h = high[0]
        mapping = list(range(state.n))
        mapping[h], mapping[0] = 0, h
        apply_chunk_swap(state, 0, h, index, f"{label}:swap_in")
        apply_cross_gate_baseline(state, g.remapped(mapping), index)
        apply_chunk_swap(state, 0, h, index, f"{label}:swap_out")
        return

    k = high[0]
    size = 1 << nc
    mapping = list(range(state.n))
    mapping[k] = nc
    block_gate = g.remapped(mapping)
    one_qubit = g.kind is GateKind.UNITARY1Q
    if one_qubit:
        m00, m01, m10, m11 = g.matrix.reshape(-1)
    block = np.empty(2 * size, dtype=np.complex128)

    chunks = state.chunks
    space = state._space
    sends = 0
    for lo, hi in _chunk_pairs(state, k - nc):
        home = space[lo]
        buf = state.acquire_buffer(home)
        buf[:] = chunks[hi]
        if one_qubit:
            a = chunks[lo].copy()
            chunks[lo] = m00 * a + m01 * buf
            buf[:] = m10 * a + m11 * buf
        else:
            block[:size] = chunks[lo]
            block[size:] = buf
            kernel_gate(block, block_gate)
            chunks[lo] = block[:size]
            buf[:] = block[size:]
        chunks[hi] = buf
        state.release_buffer(home)
        if home != space[hi]:
            sends += 2
    state.ledger.record(index, label, sends=sends)


def apply_gate(state: ChunkedState, g: Gate, index: int = -1):
    """Dispatch one non-marker gate by its classification."""
    if g.kind is GateKind.DIAGONAL:
        apply_diagonal_gate(state, g, index)
    elif g.kind is GateKind.CHUNK_SWAP:
        apply_chunk_swap(state, *g.qubits, index=index)
    elif all(q < state.nc for q in g.qubits):
        apply_local_gate(state, g, index)
    else:
        apply_cross_gate_baseline(state, g, index)


def _run_section(state: ChunkedState, section: list[Gate], index: int):
    for g in section:
        if g.kind is GateKind.DIAGONAL:
            continue
        if g.is_marker or any(q >= state.nc for q in g.qubits):
            raise MalformedCircuitError(f"blocking section at {index} holds non-local {g!r}")
    # Chunks are independent inside a section, so every chunk runs the whole
    # section in one pass. Each slow-tier chunk is fetched once and evicted
    # once, however many gates the section holds.
    offsets = _chunk_offsets(state)
    for g in section:
        kernel_gate(state.chunks, g, offsets if g.kind is GateKind.DIAGONAL else None)
    slow = state.slow_chunks
    state.ledger.record(index, f"section[{len(section)}]", fetches=slow, evictions=slow)


def execute(state: ChunkedState, c: Circuit, mode: Mode | str = Mode.BLOCKED) -> TransferLedger:
    """Interpret ``c`` on ``state`` and return the ledger of this run.

    Baseline mode ignores blocking markers and exchanges chunks for every
    gate above ``nc``. Blocked mode runs each marked section chunk by chunk.
    """
    mode = Mode(mode)
    if c.n_qubits != state.n:
        raise ValueError(f"circuit has {c.n_qubits} qubits, state has {state.n}")
    state.ledger = TransferLedger(state.chunk_bytes)
    gates = c.gates
    i = 0
    while i < len(gates):
        g = gates[i]
        if g.kind is GateKind.BEGIN_BLOCKING and mode is Mode.BLOCKED:
            j = i + 1
            while j < len(gates) and gates[j].kind not in (
                GateKind.BEGIN_BLOCKING, GateKind.END_BLOCKING
            ):
                j += 1
            if j == len(gates) or gates[j].kind is not GateKind.END_BLOCKING:
                raise MalformedCircuitError(f"begin_blocking at {i} is not closed")
            _run_section(state, list(gates[i + 1 : j]), i)
            i = j + 1
            continue
        if g.kind is GateKind.END_BLOCKING and mode is Mode.BLOCKED:
            raise MalformedCircuitError(f"end_blocking at {i} without begin_blocking")
        if g.kind not in (GateKind.BEGIN_BLOCKING, GateKind.END_BLOCKING):
            apply_gate(state, g, i)
        i += 1
    return state.ledger
