"""Benchmark workloads: Quantum Volume, QFT, and seeded random circuits.

Randomness comes from numpy's PCG64 generator seeded with the caller's
64-bit seed, so a seed reproduces the same circuit on every platform.
"""

from __future__ import annotations

import math

import numpy as np

from . import circuit as ir
from .circuit import Circuit, Gate

RANDOM_KINDS = ("u3", "cx", "cp", "swap")
QASM_KINDS = ("u3", "cx", "u1", "swap")


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR factorization of a Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # fix the column phases so the factorization is unique
    return q * (d / np.abs(d))


def quantum_volume(n: int, depth: int, seed: int = 0) -> Circuit:
    if n < 2 or depth < 1:
        raise ValueError("quantum volume needs n >= 2 and depth >= 1")
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(depth):
        perm = rng.permutation(n)
        for k in range(n // 2):
            a, b = int(perm[2 * k]), int(perm[2 * k + 1])
            gates.append(ir.unitary2q(haar_unitary(4, rng), a, b, name="su4"))
    return Circuit(n, gates)


def qft(n: int) -> Circuit:
    if n < 1:
        raise ValueError("qft needs at least one qubit")
    gates: list[Gate] = []
    for q in range(n - 1, -1, -1):
        gates.append(ir.hadamard(q))
        for j in range(q - 1, -1, -1):
            gates.append(ir.controlled_phase(math.pi / 2 ** (q - j), j, q))
    for q in range(n // 2):
        gates.append(ir.swap(q, n - 1 - q))
    return Circuit(n, gates)


def random_circuit(n: int, n_gates: int, seed: int = 0,
                   kinds: tuple[str, ...] = RANDOM_KINDS) -> Circuit:
    """Gates drawn uniformly from ``kinds``.

    Pass ``kinds=QASM_KINDS`` for circuits that survive an OpenQASM round trip.
    """
    if n < 2:
        raise ValueError("random circuits need n >= 2")
    unknown = set(kinds) - {"u3", "cx", "cp", "swap", "u1"}
    if unknown or not kinds:
        raise ValueError(f"unknown gate kinds {sorted(unknown)}")
    rng = np.random.default_rng(seed)
    gates: list[Gate] = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "u3":
            theta, psi, lam = rng.uniform(-math.pi, math.pi, 3)
            gates.append(ir.u3(theta, psi, lam, int(rng.integers(n))))
        elif kind == "u1":
            gates.append(ir.u1(rng.uniform(-math.pi, math.pi), int(rng.integers(n))))
        else:
            a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
            if kind == "cx":
                gates.append(ir.cx(a, b))
            elif kind == "cp":
                gates.append(ir.controlled_phase(rng.uniform(-math.pi, math.pi), a, b))
            else:
                gates.append(ir.swap(a, b))
    return Circuit(n, gates)
