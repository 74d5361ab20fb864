import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cacheblock import chunks, dense
from cacheblock import circuit as ir
from cacheblock.chunks import GateClass, Mode, SpaceConfig, Tier
from cacheblock.circuit import Circuit
from cacheblock.errors import CapacityError, ConfigurationError, MalformedCircuitError
from cacheblock.generators import random_circuit
from conftest import random_state


def load(state, s):
    state.chunks[:] = s.amplitudes.reshape(state.chunks.shape)


def test_partition_layout():
    st_ = chunks.partition(5, 2, SpaceConfig(2))
    assert st_.chunks.shape == (8, 4)
    assert [s for s, _ in st_.placement] == [0, 0, 0, 0, 1, 1, 1, 1]
    assert st_.chunk_bytes == 16 * 4
    assert dense.max_abs_diff(chunks.gather(st_), dense.init(5)) == 0


@pytest.mark.parametrize("kwargs", [
    dict(n=4, nc=0), dict(n=4, nc=5),
    dict(n=4, nc=2, cfg=SpaceConfig(3)),
    dict(n=4, nc=2, cfg=SpaceConfig(8)),
    dict(n=4, nc=2, cfg=SpaceConfig(1, 0)),
])
def test_invalid_configurations(kwargs):
    with pytest.raises(ConfigurationError):
        chunks.partition(**kwargs)


def test_capacity():
    with pytest.raises(CapacityError):
        chunks.partition(31, 20)


def test_fast_capacity_keeps_staging_slot():
    st_ = chunks.partition(6, 2, SpaceConfig(2, 3))
    tiers = [t for _, t in st_.placement]
    # 8 chunks per space, 2 resident, 1 staging slot
    assert tiers[:8].count(Tier.FAST) == 2
    assert st_.slow_chunks == 12
    assert chunks.partition(6, 2, SpaceConfig(2, 8)).slow_chunks == 0
    assert chunks.partition(6, 2, SpaceConfig(2, 16)).slow_chunks == 0


def test_classification_boundaries():
    st_ = chunks.partition(8, 3, SpaceConfig(4))
    got = [chunks.classify_gate_qubit(k, st_) for k in range(8)]
    assert got == [GateClass.LOCAL] * 3 + [GateClass.CROSS_CHUNK_SAME_SPACE] * 3 \
        + [GateClass.CROSS_SPACE] * 2


def _check_against_dense(n, nc, cfg, gates, rng, mode=Mode.BASELINE):
    s = random_state(n, rng)
    st_ = chunks.partition(n, nc, cfg)
    load(st_, s)
    c = Circuit(n, gates)
    chunks.execute(st_, c, mode)
    want = dense.simulate(c, s.copy())
    assert dense.max_abs_diff(chunks.gather(st_), want) <= 1e-13
    return st_


def test_local_and_cross_single_qubit(rng):
    for k in range(6):
        _check_against_dense(6, 3, SpaceConfig(2), [ir.u3(0.3, 1.1, -0.4, k)], rng)


def test_two_qubit_mixed_and_both_high(rng):
    for q0, q1 in [(0, 4), (4, 1), (3, 5), (5, 4), (2, 1)]:
        g = ir.unitary2q(np.asarray(ir.cnot_matrix()) @ np.kron(ir.u3_matrix(1, 2, 3), np.eye(2)),
                         q0, q1)
        st_ = _check_against_dense(6, 3, SpaceConfig(4), [g], rng)
        assert max(st_.buffer_peak) <= 1


def test_diagonal_never_moves_data(rng):
    gates = [ir.u1(0.4, 5), ir.controlled_phase(1.3, 4, 5), ir.controlled_phase(0.2, 0, 5)]
    st_ = _check_against_dense(6, 2, SpaceConfig(4, 1), gates, rng)
    assert st_.ledger.totals() == dict(inter_space_sends=0, inter_space_bytes=0,
                                       tier_fetches=0, tier_evictions=0)


def test_local_gate_zero_traffic(rng):
    st_ = _check_against_dense(6, 3, SpaceConfig(4, 1), [ir.cx(0, 2), ir.hadamard(1)], rng)
    assert st_.ledger.inter_space_sends == 0
    assert st_.ledger.tier_fetches == 0


def test_top_qubit_cross_space_sends():
    st_ = chunks.partition(6, 3, SpaceConfig(8))
    chunks.execute(st_, Circuit(6, [ir.hadamard(5)]), Mode.BASELINE)
    assert st_.ledger.inter_space_sends == 2 * 4
    assert st_.ledger.inter_space_bytes == 8 * 16 * 8


def test_same_space_exchange_is_free():
    st_ = chunks.partition(6, 3, SpaceConfig(2))
    chunks.execute(st_, Circuit(6, [ir.hadamard(3)]), Mode.BASELINE)
    assert st_.ledger.inter_space_sends == 0


@pytest.mark.parametrize("sq0,sq1", [(0, 3), (2, 5), (3, 5), (4, 5), (1, 4)])
def test_chunk_swap_matches_swap(sq0, sq1, rng):
    st_ = _check_against_dense(6, 3, SpaceConfig(4), [ir.chunk_swap(sq0, sq1)], rng)
    assert max(st_.buffer_peak) <= 1


def test_chunk_swap_rejects_local_pair():
    st_ = chunks.partition(4, 2)
    with pytest.raises(ValueError):
        chunks.apply_chunk_swap(st_, 0, 1)
    with pytest.raises(ValueError):
        chunks.apply_chunk_swap(st_, 3, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(1, n - 1), st.sampled_from([1, 2, 4]),
    st.integers(0, 2**32 - 1))))
def test_chunk_swap_involution(args):
    n, nc, m, seed = args
    rng = np.random.default_rng(seed)
    m = min(m, 1 << (n - nc))
    st_ = chunks.partition(n, nc, SpaceConfig(m))
    load(st_, random_state(n, rng))
    before = st_.chunks.copy()
    sq1 = int(rng.integers(nc, n))
    sq0 = int(rng.integers(0, sq1))
    chunks.apply_chunk_swap(st_, sq0, sq1)
    chunks.apply_chunk_swap(st_, sq0, sq1)
    np.testing.assert_array_equal(st_.chunks, before)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_ledger_conservation(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 9))
    nc = int(rng.integers(1, n))
    m = min(int(rng.choice([1, 2, 4])), 1 << (n - nc))
    st_ = chunks.partition(n, nc, SpaceConfig(m, 1))
    led = chunks.execute(st_, random_circuit(n, 30, seed), Mode.BASELINE)
    assert sum(e.inter_space_sends for e in led.breakdown) == led.inter_space_sends
    assert led.inter_space_bytes == led.inter_space_sends * st_.chunk_bytes
    assert led.inter_space_sends % 2 == 0
    assert max(st_.buffer_peak) <= 1
    assert m > 1 or led.inter_space_sends == 0


def test_section_counts_each_slow_chunk_once(rng):
    n, nc = 5, 2
    gates = [ir.hadamard(0), ir.cx(0, 1), ir.u1(0.2, 4)]
    c = Circuit(n, [ir.begin_blocking([0, 1])] + gates + [ir.end_blocking()])
    st_ = chunks.partition(n, nc, SpaceConfig(1, 1))
    s = random_state(n, rng)
    load(st_, s)
    led = chunks.execute(st_, c, Mode.BLOCKED)
    assert led.tier_fetches == led.tier_evictions == 8
    assert dense.max_abs_diff(chunks.gather(st_), dense.simulate(c, s.copy())) <= 1e-14


@pytest.mark.parametrize("gates", [
    [ir.begin_blocking([0]), ir.hadamard(0)],
    [ir.end_blocking()],
    [ir.begin_blocking([0]), ir.begin_blocking([0]), ir.end_blocking()],
    [ir.begin_blocking([0]), ir.hadamard(3), ir.end_blocking()],
    [ir.begin_blocking([0]), ir.chunk_swap(0, 3), ir.end_blocking()],
])
def test_malformed_sections(gates):
    st_ = chunks.partition(4, 2)
    with pytest.raises(MalformedCircuitError):
        chunks.execute(st_, Circuit(4, gates), Mode.BLOCKED)


def test_baseline_ignores_markers(rng):
    gates = [ir.begin_blocking([0]), ir.hadamard(3), ir.end_blocking()]
    _check_against_dense(4, 2, SpaceConfig(2), gates, rng, Mode.BASELINE)


def test_execute_width_mismatch():
    with pytest.raises(ValueError):
        chunks.execute(chunks.partition(4, 2), Circuit(3, []))


def test_qft_phase_gates_in_chunks(rng):
    from cacheblock.generators import qft
    st_ = _check_against_dense(6, 2, SpaceConfig(4), list(qft(6).gates), rng)
    for e in st_.ledger.breakdown:
        if e.gate in ("cp", "u1"):
            assert e.inter_space_sends == 0
    assert math.isclose(chunks.gather(st_).norm(), 1, abs_tol=1e-12)
