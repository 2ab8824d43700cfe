import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from hybridqubit.encoded import (
    CNOT,
    CZ,
    SWAP2,
    ConnectivityGraph,
    EdgeNotInGraphError,
    GateSequence,
    NonUnitaryError,
    PRESETS,
    Pulse,
    canonical_tau,
    cnot_class_residual,
    encoding_for,
    exchange_unitary,
    full_space,
    heisenberg_coupling,
    leakage_of,
    logical_block,
    logical_encoding,
    makhlin_invariants,
    phase_distance,
    preset,
    random_local,
    random_unitary,
    sequence_unitary,
    spin_operators,
    swap_matrix,
    sz_block,
)

from oracles import brute_invariants, kron_heisenberg, kron_total_spin, power_iteration_ground


def test_block_dimensions():
    assert sz_block(6, -2).dim == 15
    assert sz_block(6, 0).dim == 20
    assert full_space(6).dim == 64
    with pytest.raises(ValueError):
        sz_block(6, -1)


def test_heisenberg_matches_pauli_oracle():
    for i, j in [(0, 1), (1, 3), (0, 3)]:
        assert np.allclose(heisenberg_coupling(i, j, n_spins=4), kron_heisenberg(i, j, 4), atol=1e-15)


def test_heisenberg_pair_spectrum():
    w = np.linalg.eigvalsh(heisenberg_coupling(0, 1, n_spins=2))
    assert np.allclose(w, [-0.75, 0.25, 0.25, 0.25])


def test_chain_ground_energy_matches_power_iteration():
    h = sum(heisenberg_coupling(i, i + 1, n_spins=6) for i in range(5))
    assert np.linalg.eigvalsh(h)[0] == pytest.approx(power_iteration_ground(h), abs=1e-9)


def test_total_spin_operators_match_oracle():
    sz, s2 = spin_operators(full_space(4))
    osz, os2 = kron_total_spin(4)
    # the oracle's index k is the bitwise complement of this package's state label
    osz, os2 = osz[::-1, ::-1], os2[::-1, ::-1]
    assert np.allclose(sz, osz) and np.allclose(s2, os2)


def test_exchange_pulse_is_matrix_exponential():
    space = full_space(4)
    for tau in (0.13, 0.5, 0.77):
        h = heisenberg_coupling(1, 2, space=space)
        ref = expm(-2j * math.pi * tau * h)
        assert np.allclose(exchange_unitary((1, 2), tau, space), ref, atol=1e-13)


def test_half_pulse_is_swap_and_quarter_is_root_swap():
    space = full_space(2)
    s = swap_matrix(space, 0, 1)
    assert phase_distance(exchange_unitary((0, 1), 0.5, space), s) < 1e-12
    root = exchange_unitary((0, 1), 0.25, space)
    assert phase_distance(root @ root, s) < 1e-12
    assert phase_distance(exchange_unitary((0, 1), 1.0, space), np.eye(4)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3, allow_nan=False))
def test_exchange_is_periodic_up_to_phase(tau):
    space = sz_block(4, 0)
    a = exchange_unitary((0, 2), tau, space)
    b = exchange_unitary((0, 2), tau + 1, space)
    assert phase_distance(a, b) < 1e-10
    c = canonical_tau(tau)
    assert 0 <= c < 1 and min(abs(c - tau % 1.0), 1 - abs(c - tau % 1.0)) < 1e-9


def test_sequences_conserve_spin():
    rng = np.random.default_rng(4)
    g = preset("d")
    space = full_space(6)
    sz, s2 = spin_operators(space)
    for _ in range(5):
        edges = [g.sorted_edges()[k] for k in rng.integers(0, len(g.edges), 8)]
        u = sequence_unitary(GateSequence.from_arrays(edges, rng.random(8)), g, space)
        for op in (sz, s2):
            assert np.linalg.norm(u @ op - op @ u) < 1e-10


def test_block_agrees_with_full_space():
    rng = np.random.default_rng(9)
    g = preset("e")
    edges = [g.sorted_edges()[k] for k in rng.integers(0, len(g.edges), 12)]
    seq = GateSequence.from_arrays(edges, rng.random(12))
    full = sequence_unitary(seq, g, full_space(6))
    block = sequence_unitary(seq, g, sz_block(6, -2))
    emb = sz_block(6, -2).embedding(full_space(6))
    assert np.allclose(emb.T @ full @ emb, block, atol=1e-10)
    m_full, leak_full = logical_block(full, logical_encoding(space=full_space(6)))
    m_blk, leak_blk = logical_block(block, encoding_for(g))
    assert np.allclose(m_full, m_blk, atol=1e-10) and leak_full == pytest.approx(leak_blk, abs=1e-10)


def test_first_pulse_acts_first():
    space = sz_block(6, -2)
    seq = GateSequence.from_arrays([(0, 1), (1, 2)], [0.1, 0.3])
    u = sequence_unitary(seq, space=space)
    ref = exchange_unitary((1, 2), 0.3, space) @ exchange_unitary((0, 1), 0.1, space)
    assert np.allclose(u, ref)


def test_logical_basis_is_orthonormal_doublets():
    enc = logical_encoding()
    L = enc.logical_basis
    assert np.allclose(L.T @ L, np.eye(4), atol=1e-14)
    sz, s2 = spin_operators(enc.space)
    assert np.allclose(sz @ L, -L) and np.allclose(s2 @ L, 2 * L)


def test_intra_qubit_pulses_do_not_leak():
    rng = np.random.default_rng(0)
    g = preset("d")
    enc = encoding_for(g)
    for e in g.sorted_edges():
        if g.intra_qubit(e):
            u = sequence_unitary(GateSequence.from_arrays([e], [rng.random()]), g)
            assert logical_block(u, enc)[1] < 1e-13


def test_inter_qubit_pulse_leaks():
    g = preset("e")
    u = sequence_unitary(GateSequence.from_arrays([(2, 3)], [0.13]), g)
    assert logical_block(u, encoding_for(g))[1] > 1e-3


def test_leakage_of_identity_and_zero():
    assert leakage_of(np.eye(4)) == pytest.approx(0.0)
    assert leakage_of(np.zeros((4, 4))) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "gate,ref", [(np.eye(4), (1, 3)), (CNOT, (0, 1)), (SWAP2, (-1, -3)), (CZ, (0, 1))]
)
def test_reference_invariants(gate, ref):
    g1, g2 = makhlin_invariants(gate)
    assert abs(g1 - ref[0]) < 1e-12 and abs(g2 - ref[1]) < 1e-12
    b1, b2 = brute_invariants(gate)
    assert abs(g1 - b1) < 1e-12 and abs(g2 - b2) < 1e-12


def test_invariants_match_oracle_on_random_unitaries():
    rng = np.random.default_rng(2)
    for _ in range(20):
        u = random_unitary(4, rng)
        g1, g2 = makhlin_invariants(u)
        b1, b2 = brute_invariants(u)
        assert abs(g1 - b1) < 1e-8 and abs(g2 - b2) < 1e-8


def test_local_dressing_preserves_cnot_class():
    rng = np.random.default_rng(5)
    for _ in range(50):
        u = random_local(rng) @ CNOT @ random_local(rng)
        g1, g2 = makhlin_invariants(u)
        assert cnot_class_residual(g1, g2) < 1e-16
    assert cnot_class_residual(*makhlin_invariants(SWAP2)) > 1


def test_non_unitary_rejected():
    with pytest.raises(NonUnitaryError):
        makhlin_invariants(0.5 * np.eye(4))


def test_graph_presets_and_validation():
    assert set(PRESETS) == {"d", "e", "f"}
    assert len(preset("e").edges) == 5
    with pytest.raises(KeyError):
        preset("z")
    g = preset("e")
    with pytest.raises(EdgeNotInGraphError):
        GateSequence.from_arrays([(0, 2)], [0.5]).validate(g)
    with pytest.raises(ValueError):
        Pulse((1, 1), 0.2)
    assert ConnectivityGraph.from_dict(g.to_dict()).sorted_edges() == g.sorted_edges()


def test_sequence_json_round_trip(tmp_path):
    seq = GateSequence.from_arrays([(0, 1), (2, 3), (4, 5)], [0.1, 0.25, 0.9], seed=3)
    path = tmp_path / "s.json"
    path.write_text(seq.to_json())
    back = GateSequence.load(path)
    assert back.edges == seq.edges and np.array_equal(back.taus, seq.taus)
    assert json.loads(seq.to_json())["time_steps"] == 1


def test_time_steps_group_disjoint_pulses():
    seq = GateSequence.from_arrays([(0, 1), (3, 4), (1, 2), (2, 3)], [0.1] * 4)
    assert len(seq.time_steps()) == 3
