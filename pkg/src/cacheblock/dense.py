"""Single-array state-vector simulator.

This is the reference every chunked result is compared against. The
kernels work on the last axis of an array, so the chunk engine reuses them
unchanged on a ``(chunks, 2**nc)`` block.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate, GateKind
from .errors import CapacityError

MAX_QUBITS = 30


@dataclass
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got {self.amplitudes.shape}")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def copy(self) -> DenseState:
        return DenseState(self.n, self.amplitudes.copy())


def check_capacity(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside [1, {MAX_QUBITS}]")


def init(n: int) -> DenseState:
    check_capacity(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return DenseState(n, amps)


def pair_addresses(i, k: int):
    """Indices ``(i0, i1)`` of the ``i``-th amplitude pair for a gate on qubit ``k``.

    Works elementwise on integer arrays as well as on scalars.
    """
    add = 1 << k
    mask = add - 1
    low = i & mask
    i0 = ((i - low) << 1) + low
    return i0, i0 + add


@lru_cache(maxsize=512)
def _pair_table(n: int, k: int):
    i0, i1 = pair_addresses(np.arange(1 << (n - 1), dtype=np.int64), k)
    i0.setflags(write=False)
    i1.setflags(write=False)
    return i0, i1


@lru_cache(maxsize=512)
def _group_table(n: int, q_low: int, q_high: int):
    lo, hi = sorted((q_low, q_high))
    base = np.arange(1 << (n - 2), dtype=np.int64)
    # open a zero bit at the lower position, then at the higher one
    base = ((base >> lo) << (lo + 1)) | (base & ((1 << lo) - 1))
    base = ((base >> hi) << (hi + 1)) | (base & ((1 << hi) - 1))
    b0, b1 = 1 << q_low, 1 << q_high
    table = np.stack([base, base | b0, base | b1, base | b0 | b1], axis=-1)
    table.setflags(write=False)
    return table


def _width(amps: np.ndarray) -> int:
    return int(amps.shape[-1]).bit_length() - 1


def kernel_1q(amps: np.ndarray, m: np.ndarray, k: int):
    """In place: rotate every amplitude pair that differs only in bit ``k``."""
    i0, i1 = _pair_table(_width(amps), k)
    q0 = amps[..., i0]
    q1 = amps[..., i1]
    amps[..., i0] = m[0, 0] * q0 + m[0, 1] * q1
    amps[..., i1] = m[1, 0] * q0 + m[1, 1] * q1


def kernel_2q(amps: np.ndarray, m: np.ndarray, q_low: int, q_high: int):
    """In place: multiply each 4-amplitude group by ``m``.

    The group is ordered (00, 01, 10, 11) on bits (q_high, q_low).
    """
    table = _group_table(_width(amps), q_low, q_high)
    vec = amps[..., table]
    amps[..., table] = vec @ np.asarray(m).T


def diagonal_factors(indices: np.ndarray, qubits, phases: np.ndarray) -> np.ndarray:
    sub = np.zeros_like(indices)
    for j, q in enumerate(qubits):
        sub |= ((indices >> q) & 1) << j
    return phases[sub]


def kernel_gate(amps: np.ndarray, g: Gate, index_offset: np.ndarray | None = None):
    """Apply any non-marker gate to the last axis of ``amps``.

    ``index_offset`` (broadcastable against ``amps``) is added to local
    indices when computing diagonal phases, so a chunk can see its global
    position.
    """
    kind = g.kind
    if kind is GateKind.UNITARY1Q:
        kernel_1q(amps, g.matrix, g.qubits[0])
    elif kind in (GateKind.UNITARY2Q, GateKind.SWAP, GateKind.CHUNK_SWAP):
        kernel_2q(amps, g.matrix, g.qubits[0], g.qubits[1])
    elif kind is GateKind.DIAGONAL:
        idx = np.arange(amps.shape[-1], dtype=np.int64)
        if index_offset is not None:
            idx = idx + index_offset
        amps *= diagonal_factors(idx, g.qubits, g.matrix)
    else:
        raise ValueError(f"{kind.value} is not a computational gate")


def apply_1q(s: DenseState, m: np.ndarray, k: int):
    if not 0 <= k < s.n:
        raise ValueError(f"qubit {k} out of range for {s.n} qubits")
    kernel_1q(s.amplitudes, np.asarray(m), k)


def apply_2q(s: DenseState, m: np.ndarray, q_low: int, q_high: int):
    if q_low == q_high or not (0 <= q_low < s.n and 0 <= q_high < s.n):
        raise ValueError(f"invalid qubit pair ({q_low}, {q_high}) for {s.n} qubits")
    kernel_2q(s.amplitudes, m, q_low, q_high)


def apply_diagonal(s: DenseState, d: Gate):
    if d.kind is not GateKind.DIAGONAL:
        raise ValueError("apply_diagonal needs a diagonal gate")
    kernel_gate(s.amplitudes, d)


def apply_gate(s: DenseState, g: Gate):
    """Apply ``g``; blocking markers are no-ops and chunk swaps act as swaps."""
    if g.kind in (GateKind.BEGIN_BLOCKING, GateKind.END_BLOCKING):
        return
    kernel_gate(s.amplitudes, g)


def simulate(c: Circuit, state: DenseState | None = None) -> DenseState:
    s = init(c.n_qubits) if state is None else state
    for g in c.gates:
        apply_gate(s, g)
    return s


def permute_qubits(s: DenseState, p) -> DenseState:
    """Relabel qubits: bit ``q`` of the new index is bit ``p[q]`` of the old one.

    For a transpiled circuit with logical->physical map ``final_map``,
    ``permute_qubits(physical_state, final_map)`` gives the logical state.
    """
    p = [int(x) for x in p]
    if sorted(p) != list(range(s.n)):
        raise ValueError(f"{p} is not a permutation of range({s.n})")
    j = np.arange(1 << s.n, dtype=np.int64)
    src = np.zeros_like(j)
    for q, pq in enumerate(p):
        src |= ((j >> q) & 1) << pq
    return DenseState(s.n, s.amplitudes[src])


def max_abs_diff(a: DenseState, b: DenseState) -> float:
    if a.n != b.n:
        raise ValueError(f"width mismatch: {a.n} vs {b.n} qubits")
    return float(np.max(np.abs(a.amplitudes - b.amplitudes)))
