import numpy as np
import pytest

from cacheblock.circuit import GateKind
from cacheblock.dense import DenseState
from cacheblock.transpiler import QubitMap

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str = ""):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def random_state(n: int, rng: np.random.Generator) -> DenseState:
    v = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return DenseState(n, v / np.linalg.norm(v))


def full_operator(n: int, m: np.ndarray, qubits) -> np.ndarray:
    """2^n x 2^n matrix of a k-qubit gate, built by index enumeration.

    ``m`` is indexed by sum(bit(qubits[j]) << j). Independent of the
    pair/group address tables used by the simulator.
    """
    dim = 1 << n
    k = len(qubits)
    full = np.zeros((dim, dim), dtype=np.complex128)
    for i in range(dim):
        col = sum(((i >> q) & 1) << j for j, q in enumerate(qubits))
        for row in range(1 << k):
            out = i
            for j, q in enumerate(qubits):
                out = (out & ~(1 << q)) | (((row >> j) & 1) << q)
            full[out, i] += m[row, col]
    return full


def kron_1q(n: int, m: np.ndarray, k: int) -> np.ndarray:
    """Tensor-product form: identity on every qubit except ``k``."""
    out = np.eye(1)
    for q in range(n - 1, -1, -1):
        out = np.kron(out, m if q == k else np.eye(2))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def order_preserved(c, res) -> bool:
    """Each original gate appears once, on the same logical qubits, and every
    logical qubit sees its gates in the original order."""
    qmap = QubitMap.identity(c.n_qubits)
    kept = []
    for g, origin in zip(res.circuit.gates, res.origins):
        if g.kind is GateKind.CHUNK_SWAP:
            qmap.apply_swap(*g.qubits)
        elif origin is not None:
            inv = qmap.inverse()
            kept.append((origin, [inv[p] for p in g.qubits]))
    if sorted(o for o, _ in kept) != list(range(len(c.gates))):
        return False
    seqs = [[] for _ in range(c.n_qubits)]
    for origin, logical in kept:
        if sorted(logical) != sorted(c.gates[origin].qubits):
            return False
        for q in logical:
            seqs[q].append(origin)
    return all(s == sorted(s) for s in seqs)
