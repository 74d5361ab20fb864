import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cacheblock import circuit as ir
from cacheblock.circuit import Circuit, Gate, GateKind

INV_SQRT2 = 1 / math.sqrt(2)


def test_u3_identity():
    np.testing.assert_array_equal(ir.u3_matrix(0, 0, 0), np.eye(2))


def test_u3_pauli_x():
    np.testing.assert_allclose(ir.u3_matrix(math.pi, 0, math.pi), [[0, 1], [1, 0]], atol=1e-15)


def test_u3_hadamard():
    expected = INV_SQRT2 * np.array([[1, 1], [1, -1]])
    np.testing.assert_allclose(ir.u3_matrix(math.pi / 2, 0, math.pi), expected, atol=1e-15)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_u3_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        ir.u3_matrix(bad, 0, 0)
    with pytest.raises(ValueError):
        ir.u1_phases(bad)


def test_u3_matches_trig_expansion(rng):
    for theta, psi, lam in rng.uniform(-2 * math.pi, 2 * math.pi, (100, 3)):
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        expected = np.array([
            [c, -cmath.rect(s, lam)],
            [cmath.rect(s, psi), cmath.rect(c, psi + lam)],
        ])
        m = ir.u3_matrix(theta, psi, lam)
        assert np.max(np.abs(m - expected)) <= 1e-15
        assert ir.is_unitary(m)


def test_cnot_flips_when_high_bit_set():
    m = ir.cnot_matrix()
    basis = np.eye(4)
    np.testing.assert_array_equal(m @ basis[2], basis[3])
    np.testing.assert_array_equal(m @ basis[0], basis[0])
    np.testing.assert_array_equal(m @ m, np.eye(4))


def test_u1_and_controlled_phase():
    np.testing.assert_array_equal(ir.u1_phases(0), [1, 1])
    np.testing.assert_allclose(ir.u1_phases(math.pi), [1, -1], atol=1e-15)
    plus = np.array([INV_SQRT2, INV_SQRT2])
    np.testing.assert_allclose(ir.u1_phases(math.pi / 2) * plus, [INV_SQRT2, 1j * INV_SQRT2],
                               atol=1e-15)
    np.testing.assert_array_equal(ir.controlled_phase_phases(0), np.ones(4))
    cp = ir.controlled_phase(math.pi, 0, 1)
    np.testing.assert_allclose(cp.matrix * np.eye(4)[3], -np.eye(4)[3], atol=1e-15)
    assert ir.is_diagonal(cp)


def test_is_diagonal_is_kind_based():
    assert not ir.is_diagonal(ir.u3(math.pi, 0, math.pi, 0))
    assert not ir.is_diagonal(ir.swap(0, 1))
    assert ir.is_diagonal(ir.u1(0.3, 2))


def test_cx_qubit_convention():
    g = ir.cx(1, 0)
    assert g.control == 1 and g.target == 0
    assert g.qubits == (0, 1)


def test_commute_for_reorder_examples():
    u = ir.u3(0.1, 0.2, 0.3, 0)
    assert ir.gates_commute_for_reorder(u, ir.cx(2, 3))
    assert not ir.gates_commute_for_reorder(ir.cx(0, 1), ir.cx(1, 2))
    assert not ir.gates_commute_for_reorder(u, u)


def _gate_strategy(n=6):
    qubit = st.integers(0, n - 1)
    pair = st.lists(qubit, min_size=2, max_size=2, unique=True)
    angle = st.floats(-4, 4)
    return st.one_of(
        st.builds(lambda q, a: ir.u3(a, a / 2, -a, q), qubit, angle),
        st.builds(lambda p: ir.cx(*p), pair),
        st.builds(lambda p, a: ir.controlled_phase(a, *p), pair, angle),
        st.builds(lambda p: ir.swap(*p), pair),
    )


@given(_gate_strategy(), _gate_strategy())
def test_commute_for_reorder_is_symmetric(a, b):
    assert ir.gates_commute_for_reorder(a, b) == ir.gates_commute_for_reorder(b, a)


def test_gate_invariants_enforced():
    with pytest.raises(ValueError):
        Gate(GateKind.UNITARY1Q, (0,), np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        Gate(GateKind.DIAGONAL, (0,), np.array([1, 2]))
    with pytest.raises(ValueError):
        ir.chunk_swap(3, 1)
    with pytest.raises(ValueError):
        ir.cx(2, 2)
    with pytest.raises(ValueError):
        Circuit(2, [ir.cx(0, 2)])


def test_gate_matrices_are_read_only():
    g = ir.u3(0.3, 0.1, 0.2, 0)
    with pytest.raises(ValueError):
        g.matrix[0, 0] = 5


def test_remap_keeps_semantics():
    g = ir.cx(3, 1).remapped([0, 5, 2, 4, 3, 1])
    assert g.control == 4 and g.target == 5
    assert ir.chunk_swap(1, 3).remapped([0, 3, 2, 1]).qubits == (1, 3)
