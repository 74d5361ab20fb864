"""Gate and circuit model.

Qubit ``k`` is bit ``k`` of a basis-state index (zero-based, little-endian).
A two-qubit matrix is indexed by ``2*b1 + b0`` where ``b0`` is the bit of
``gate.qubits[0]`` and ``b1`` the bit of ``gate.qubits[1]``.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

UNITARY_ATOL = 1e-12


class GateKind(enum.Enum):
    UNITARY1Q = "unitary1q"
    UNITARY2Q = "unitary2q"
    DIAGONAL = "diagonal"
    SWAP = "swap"
    CHUNK_SWAP = "chunk_swap"
    BEGIN_BLOCKING = "begin_blocking"
    END_BLOCKING = "end_blocking"


MARKER_KINDS = frozenset(
    {GateKind.CHUNK_SWAP, GateKind.BEGIN_BLOCKING, GateKind.END_BLOCKING}
)

SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Gate:
    """One circuit operation.

    ``matrix`` is the 2x2 / 4x4 unitary for UNITARY1Q, UNITARY2Q, SWAP and
    CHUNK_SWAP, the phase vector (length ``2**len(qubits)``) for DIAGONAL,
    and None for blocking markers. ``name`` and ``params`` keep the
    parameterization the gate was built from, when there is one.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    matrix: np.ndarray | None = None
    name: str = ""
    params: tuple[float, ...] = ()

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"duplicate qubits in {self.kind.value}: {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"negative qubit index in {qubits}")

        kind = self.kind
        if kind in (GateKind.BEGIN_BLOCKING, GateKind.END_BLOCKING):
            if self.matrix is not None:
                raise ValueError("blocking markers carry no matrix")
            if kind is GateKind.END_BLOCKING and qubits:
                raise ValueError("end_blocking takes no qubits")
            return

        if kind in (GateKind.SWAP, GateKind.CHUNK_SWAP):
            if len(qubits) != 2:
                raise ValueError(f"{kind.value} acts on exactly two qubits")
            if kind is GateKind.CHUNK_SWAP and not qubits[0] < qubits[1]:
                raise ValueError(f"chunk_swap needs sq0 < sq1, got {qubits}")
            object.__setattr__(self, "matrix", _frozen(SWAP_MATRIX))
            return

        if self.matrix is None:
            raise ValueError(f"{kind.value} gate requires a matrix")
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)

        if kind is GateKind.DIAGONAL:
            if m.shape != (1 << len(qubits),) or not qubits:
                raise ValueError(
                    f"diagonal over {len(qubits)} qubits needs {1 << len(qubits)} phases"
                )
            if np.max(np.abs(np.abs(m) - 1.0)) > UNITARY_ATOL:
                raise ValueError("diagonal entries must have unit modulus")
            return

        width = 1 if kind is GateKind.UNITARY1Q else 2
        dim = 1 << width
        if len(qubits) != width or m.shape != (dim, dim):
            raise ValueError(f"{kind.value} needs {width} qubit(s) and a {dim}x{dim} matrix")
        if not is_unitary(m):
            raise ValueError(f"{kind.value} matrix is not unitary")

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.qubits, self.name, self.params) != (
            other.kind,
            other.qubits,
            other.name,
            other.params,
        ):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is None and other.matrix is None
        return np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.kind, self.qubits, self.name, self.params))

    def __repr__(self):
        label = self.name or self.kind.value
        if self.params:
            label += "(" + ",".join(f"{p:.6g}" for p in self.params) + ")"
        return f"<{label} {list(self.qubits)}>"

    @property
    def is_marker(self) -> bool:
        return self.kind in MARKER_KINDS

    @property
    def control(self) -> int:
        """Control qubit of a ``cx`` gate (the matrix's high bit)."""
        if self.name != "cx":
            raise AttributeError("only cx gates have a control qubit")
        return self.qubits[1]

    @property
    def target(self) -> int:
        if self.name != "cx":
            raise AttributeError("only cx gates have a target qubit")
        return self.qubits[0]

    def remapped(self, mapping: Sequence[int]) -> Gate:
        """Same operation with every qubit ``q`` replaced by ``mapping[q]``."""
        qubits = tuple(mapping[q] for q in self.qubits)
        if self.kind is GateKind.CHUNK_SWAP:
            qubits = tuple(sorted(qubits))
        return Gate(self.kind, qubits, self.matrix, self.name, self.params)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        for i, g in enumerate(self.gates):
            if any(q >= self.n_qubits for q in g.qubits):
                raise ValueError(
                    f"gate {i} {g!r} addresses a qubit >= {self.n_qubits}"
                )

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def extended(self, gates: Iterable[Gate]) -> Circuit:
        return Circuit(self.n_qubits, self.gates + tuple(gates))


def is_unitary(m: np.ndarray, atol: float = UNITARY_ATOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= atol)


def _check_finite(*values: float):
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"gate parameter must be finite, got {v!r}")


def u3_matrix(theta: float, psi: float, lam: float) -> np.ndarray:
    _check_finite(theta, psi, lam)
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * psi) * s, np.exp(1j * (psi + lam)) * c],
        ],
        dtype=np.complex128,
    )


def cnot_matrix() -> np.ndarray:
    # higher bit controls the lower bit
    return np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
    )


def u1_phases(lam: float) -> np.ndarray:
    _check_finite(lam)
    return np.array([1.0, np.exp(1j * lam)], dtype=np.complex128)


def controlled_phase_phases(lam: float) -> np.ndarray:
    _check_finite(lam)
    return np.array([1.0, 1.0, 1.0, np.exp(1j * lam)], dtype=np.complex128)


# Gate constructors. Each keeps its parameters so the gate can be re-emitted.

def u3(theta: float, psi: float, lam: float, qubit: int) -> Gate:
    return Gate(GateKind.UNITARY1Q, (qubit,), u3_matrix(theta, psi, lam), "u3",
                (theta, psi, lam))


def hadamard(qubit: int) -> Gate:
    return u3(math.pi / 2, 0.0, math.pi, qubit)


def u1(lam: float, qubit: int) -> Gate:
    return Gate(GateKind.DIAGONAL, (qubit,), u1_phases(lam), "u1", (lam,))


def cx(control: int, target: int) -> Gate:
    return Gate(GateKind.UNITARY2Q, (target, control), cnot_matrix(), "cx")


def controlled_phase(lam: float, q0: int, q1: int) -> Gate:
    return Gate(GateKind.DIAGONAL, (q0, q1), controlled_phase_phases(lam), "cp", (lam,))


def unitary2q(matrix: np.ndarray, q_low: int, q_high: int, name: str = "unitary") -> Gate:
    return Gate(GateKind.UNITARY2Q, (q_low, q_high), matrix, name)


def swap(q0: int, q1: int) -> Gate:
    return Gate(GateKind.SWAP, (q0, q1), name="swap")


def chunk_swap(sq0: int, sq1: int) -> Gate:
    return Gate(GateKind.CHUNK_SWAP, (sq0, sq1), name="chunk_swap")


def begin_blocking(qubits: Iterable[int]) -> Gate:
    return Gate(GateKind.BEGIN_BLOCKING, tuple(sorted(qubits)), name="begin_blocking")


def end_blocking() -> Gate:
    return Gate(GateKind.END_BLOCKING, (), name="end_blocking")


def gates_commute_for_reorder(g1: Gate, g2: Gate) -> bool:
    """True when the two gates touch disjoint qubits.

    Disjointness is sufficient for the two gates to be swapped in order;
    no algebraic commutation is attempted.
    """
    if g1 is g2:
        return False
    return not set(g1.qubits) & set(g2.qubits)


def is_diagonal(g: Gate) -> bool:
    return g.kind is GateKind.DIAGONAL


def dense_matrix(g: Gate) -> np.ndarray:
    """Square matrix of ``g`` in its own qubit ordering."""
    if g.kind is GateKind.DIAGONAL:
        return np.diag(g.matrix)
    if g.matrix is None:
        raise ValueError(f"{g.kind.value} has no matrix")
    return np.array(g.matrix)
