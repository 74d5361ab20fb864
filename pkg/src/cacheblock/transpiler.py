"""Cache-blocking transpiler.

Rewrites a circuit so every non-diagonal gate acts on physical qubits below
``nc``. Chunk swaps move the qubits that upcoming gates need into the chunk,
and gates that can run inside the chunk are gathered between
``begin_blocking`` / ``end_blocking`` markers.

Qubit maps are logical -> physical lists: ``qubit_map[l]`` is the physical
slot currently holding logical qubit ``l``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from . import circuit as ir
from .circuit import Circuit, Gate, GateKind
from .errors import InfeasibleBlockingError


@dataclass
class QubitMap:
    mapping: list[int]
    history: list[tuple[int, tuple[int, int]]] = field(default_factory=list)

    @classmethod
    def identity(cls, n: int) -> QubitMap:
        return cls(list(range(n)))

    def physical(self, logical: int) -> int:
        return self.mapping[logical]

    def inverse(self) -> list[int]:
        inv = [0] * len(self.mapping)
        for logical, phys in enumerate(self.mapping):
            inv[phys] = logical
        return inv

    def apply_swap(self, p0: int, p1: int, at: int = -1):
        """Exchange whatever logical qubits sit in physical slots ``p0`` and ``p1``."""
        inv = self.inverse()
        l0, l1 = inv[p0], inv[p1]
        self.mapping[l0], self.mapping[l1] = p1, p0
        self.history.append((at, (p0, p1)))

    def copy(self) -> QubitMap:
        return QubitMap(list(self.mapping), list(self.history))

    def is_identity(self) -> bool:
        return self.mapping == list(range(len(self.mapping)))


@dataclass
class TranspileStats:
    chunk_swaps_inserted: int = 0
    sections: int = 0
    gates_per_section: list[int] = field(default_factory=list)


@dataclass
class TranspileResult:
    circuit: Circuit
    final_map: QubitMap
    stats: TranspileStats
    nc: int
    # index into the input circuit for every output gate, None for inserted ones
    origins: list[int | None] = field(default_factory=list)


def _needs_chunk(g: Gate) -> bool:
    return not g.is_marker and g.kind is not GateKind.DIAGONAL


def select_chunk_qubits(remaining: Sequence[Gate], current_map: QubitMap, nc: int,
                        first: Iterable[int] = ()) -> list[int]:
    """Logical qubits to keep in the chunk for the next section.

    Qubits of upcoming multi-qubit gates are taken first, in order of
    appearance, a whole gate at a time while it still fits. Leftover room
    goes to qubits of upcoming single-qubit gates and then to qubits already
    in the chunk, lowest logical index first. ``first`` forces qubits to the
    front of the selection.
    """
    chosen: list[int] = []

    def take(qubits):
        new = [q for q in qubits if q not in chosen]
        if len(chosen) + len(new) <= nc:
            chosen.extend(new)

    take(first)
    work = [g for g in remaining if _needs_chunk(g)]
    for g in work:
        if len(chosen) == nc:
            break
        if len(g.qubits) > 1:
            take(g.qubits)
    for g in work:
        if len(chosen) == nc:
            break
        if len(g.qubits) == 1:
            take(g.qubits)
    residents = sorted(l for l, p in enumerate(current_map.mapping) if p < nc)
    for q in residents:
        if len(chosen) == nc:
            break
        take((q,))
    return chosen


def insert_chunk_swaps(current_map: QubitMap, target: Iterable[int], nc: int,
                       at: int = -1) -> tuple[list[Gate], QubitMap]:
    """Chunk swaps that bring every ``target`` qubit below ``nc``.

    Each incoming qubit is paired with the lowest physical chunk slot whose
    occupant is not a target.
    """
    target = list(target)
    if len(target) > nc:
        raise ValueError(f"{len(target)} target qubits do not fit {nc} chunk slots")
    new_map = current_map.copy()
    inv = new_map.inverse()
    incoming = sorted(new_map.mapping[t] for t in target if new_map.mapping[t] >= nc)
    tset = set(target)
    free = [p for p in range(nc) if inv[p] not in tset]
    if len(incoming) > len(free):
        raise AssertionError("more incoming qubits than evictable chunk slots")
    swaps = []
    for p_in, p_out in zip(incoming, free):
        swaps.append(ir.chunk_swap(p_out, p_in))
        new_map.apply_swap(p_out, p_in, at)
    return swaps, new_map


def _scan(remaining: list[Gate], chunk: set[int]):
    """One pass over ``remaining``: (emitted indices, deferred indices)."""
    blocked: set[int] = set()
    emitted, deferred = [], []
    for i, g in enumerate(remaining):
        qs = g.qubits
        ok = not blocked.intersection(qs) and (
            g.kind is GateKind.DIAGONAL or chunk.issuperset(qs)
        )
        if ok:
            emitted.append(i)
        else:
            # later gates on these qubits must wait for this one
            blocked.update(qs)
            deferred.append(i)
    return emitted, deferred


def cache_block(c: Circuit, nc: int, restore_order: bool = False) -> TranspileResult:
    """Insert chunk swaps and blocking markers so every section runs inside a chunk.

    Executing ``result.circuit`` and relabeling the outcome with
    ``permute_qubits(state, result.final_map.mapping)`` reproduces ``c``.
    With ``restore_order`` the closing swaps are appended and the final map
    is the identity.
    """
    n = c.n_qubits
    if not 1 <= nc <= n:
        raise InfeasibleBlockingError(f"chunk qubits {nc} outside [1, {n}]")
    for i, g in enumerate(c.gates):
        if g.is_marker:
            raise ValueError(f"gate {i} is a {g.kind.value} marker; input is already blocked")
        if _needs_chunk(g) and len(g.qubits) > nc:
            raise InfeasibleBlockingError(
                f"gate {i} {g!r} needs {len(g.qubits)} qubits in a chunk of {nc}"
            )

    qmap = QubitMap.identity(n)
    stats = TranspileStats()
    out: list[Gate] = []
    origins: list[int | None] = []
    remaining = list(range(len(c.gates)))

    while remaining:
        gates = [c.gates[i] for i in remaining]
        chosen = select_chunk_qubits(gates, qmap, nc)
        emitted, deferred = _scan(gates, set(chosen))
        if not emitted:
            # A deferred single-qubit gate can chain through diagonals into
            # the gates that drove the selection; seed with the head gate.
            chosen = select_chunk_qubits(gates, qmap, nc, first=gates[0].qubits)
            emitted, deferred = _scan(gates, set(chosen))

        swaps, qmap = insert_chunk_swaps(qmap, chosen, nc, at=len(out))
        out.extend(swaps)
        origins.extend([None] * len(swaps))
        stats.chunk_swaps_inserted += len(swaps)

        out.append(ir.begin_blocking(qmap.mapping[q] for q in chosen))
        origins.append(None)
        for k in emitted:
            out.append(gates[k].remapped(qmap.mapping))
            origins.append(remaining[k])
        out.append(ir.end_blocking())
        origins.append(None)
        stats.sections += 1
        stats.gates_per_section.append(len(emitted))
        remaining = [remaining[k] for k in deferred]

    result = TranspileResult(Circuit(n, out), qmap, stats, nc, origins)
    if restore_order:
        tail = restore_output_order(result)
        result.circuit = result.circuit.extended(tail)
        result.origins.extend([None] * len(tail))
        stats.chunk_swaps_inserted += len(tail)
        for g in tail:
            qmap.apply_swap(*g.qubits, at=len(out))
    return result


def restore_output_order(result: TranspileResult) -> list[Gate]:
    """Chunk swaps that return every logical qubit to its own physical slot.

    Transpositions come from walking slots in ascending order. A
    transposition of two in-chunk slots has no chunk-swap form, so it is
    routed through the top qubit as three chunk swaps.
    """
    n = len(result.final_map.mapping)
    nc = result.nc
    work = result.final_map.copy()
    swaps: list[Gate] = []
    for slot in range(n):
        where = work.mapping[slot]
        if where == slot:
            continue
        a, b = slot, where
        if b >= nc:
            swaps.append(ir.chunk_swap(a, b))
        else:
            top = n - 1
            swaps += [ir.chunk_swap(a, top), ir.chunk_swap(b, top), ir.chunk_swap(a, top)]
        work.apply_swap(a, b)
    return swaps


def verify_blocked(c: Circuit, nc: int) -> bool:
    """Every non-diagonal compute gate is below ``nc`` and markers nest properly."""
    open_section = False
    for g in c.gates:
        if g.kind is GateKind.BEGIN_BLOCKING:
            if open_section:
                return False
            open_section = True
        elif g.kind is GateKind.END_BLOCKING:
            if not open_section:
                return False
            open_section = False
        elif g.kind is GateKind.CHUNK_SWAP:
            if open_section or g.qubits[1] < nc:
                return False
        elif g.kind is not GateKind.DIAGONAL and any(q >= nc for q in g.qubits):
            return False
    return not open_section
