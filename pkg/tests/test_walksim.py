import math

import numpy as np
import pytest

from ltcds.errors import ParameterError, SimulationError
from ltcds.ltcodec import StoragePacket
from ltcds.netmodel import connected_rgg, graph_stats, select_sources
from ltcds.soliton import ideal_soliton
from ltcds.walksim import (
    StorageSnapshot,
    measure_walk_statistics,
    run_ltcds_i,
    run_ltcds_ii,
    run_update,
)

from conftest import graph_from_points, path2


def make_run(n=80, k=8, side=4.0, c1=3.0, seed=0, payload=16):
    g = connected_rgg(n, side, seed)
    rng = np.random.default_rng(seed + 1)
    ids = select_sources(g, k, rng)
    sources = {s: rng.bytes(payload) for s in ids}
    snap = run_ltcds_i(g, sources, ideal_soliton(k), c1, rng)
    return g, sources, snap


def xor_truth(sources, ids, length):
    acc = bytearray(length)
    for s in ids:
        for j, b in enumerate(sources[s]):
            acc[j] ^= b
    return bytes(acc)


def test_two_node_single_source_full_replication():
    g = path2()
    src = {0: bytes.fromhex("00112233445566778899aabbccddeeff")}
    snap = run_ltcds_i(g, src, ideal_soliton(1), 5.0, np.random.default_rng(3))
    for p in snap.packets:
        assert p.ids == frozenset({0})
        assert p.payload == src[0]


def test_counters_and_transmissions_within_bounds():
    g, _, snap = make_run()
    t = snap.counter_threshold
    assert t == math.ceil(3.0 * g.n * math.log(g.n))
    counters = list(snap.final_counters.values())
    assert len(counters) == snap.k
    assert all(t <= c <= t + g.n for c in counters)
    assert snap.transmissions == sum(counters)
    assert snap.k * t <= snap.transmissions <= snap.k * (t + g.n)


def test_every_node_rules_on_every_source():
    # C1 = 5 gives each walk ample slack beyond the cover time
    _, _, snap = make_run(n=60, k=6, side=3.5, c1=5.0, seed=2)
    assert all(d == snap.k for d in snap.decided_counts)


def test_storage_payload_matches_accepted_ids():
    _, sources, snap = make_run(seed=5)
    for p in snap.packets:
        assert p.payload == xor_truth(sources, p.ids, 16)


def test_storage_ids_subset_of_sources():
    _, sources, snap = make_run(seed=6)
    valid = set(sources)
    for p in snap.packets:
        assert p.ids <= valid


def test_deterministic_given_seed():
    _, _, a = make_run(seed=9)
    _, _, b = make_run(seed=9)
    assert a == b


def test_different_seed_changes_outcome():
    _, _, a = make_run(seed=9)
    _, _, b = make_run(seed=10)
    assert a.packets != b.packets


def test_disconnected_graph_rejected():
    g = graph_from_points([[0.0, 0.0], [3.0, 0.0]])
    with pytest.raises(SimulationError):
        run_ltcds_i(g, {0: bytes(16)}, ideal_soliton(1), 3.0, np.random.default_rng(0))


def test_mismatched_distribution_rejected():
    g = path2()
    with pytest.raises(ParameterError):
        run_ltcds_i(g, {0: bytes(16)}, ideal_soliton(2), 3.0, np.random.default_rng(0))


# --- second algorithm ------------------------------------------------------


def test_ltcds2_single_source_khat_one():
    g = connected_rgg(30, 3.0, 4)
    src = {5: bytes(16)}
    snap = run_ltcds_ii(g, src, "ideal", 4, 3.0, np.random.default_rng(1))
    assert snap.k_hat == tuple([1] * g.n)
    assert all(nh >= 1.0 for nh in snap.n_hat)


def test_ltcds2_every_node_gets_estimates_and_threshold():
    g = connected_rgg(60, 3.5, 12)
    rng = np.random.default_rng(2)
    ids = select_sources(g, 6, rng)
    sources = {s: rng.bytes(16) for s in ids}
    snap = run_ltcds_ii(g, sources, "ideal", 8, 5.0, rng)
    assert len(snap.n_hat) == g.n
    assert all(kh >= 1 for kh in snap.k_hat)
    assert all(th >= 0 for th in snap.node_thresholds)
    assert snap.inference_rounds > 0
    assert snap.rounds > snap.inference_rounds
    assert snap.transmissions == sum(snap.final_counters.values())
    for p in snap.packets:
        assert p.payload == xor_truth(sources, p.ids, 16)


def test_ltcds2_deterministic():
    g = connected_rgg(40, 3.0, 7)
    rng_a = np.random.default_rng(3)
    rng_b = np.random.default_rng(3)
    ids = select_sources(g, 4, np.random.default_rng(8))
    sources = {s: bytes([s % 256]) * 16 for s in ids}
    a = run_ltcds_ii(g, sources, "robust", 5, 4.0, rng_a)
    b = run_ltcds_ii(g, sources, "robust", 5, 4.0, rng_b)
    assert a == b


def test_ltcds2_rejects_small_c2():
    g = path2()
    with pytest.raises(ParameterError):
        run_ltcds_ii(g, {0: bytes(16)}, "ideal", 1, 3.0, np.random.default_rng(0))


def test_ltcds2_transmissions_within_factor_three():
    n, k, c3 = 200, 20, 10.0
    g = connected_rgg(n, math.sqrt(n * 9 / 40), 9)
    rng = np.random.default_rng(10)
    ids = select_sources(g, k, rng)
    sources = {s: rng.bytes(16) for s in ids}
    snap = run_ltcds_ii(g, sources, "ideal", 50, c3, rng)
    nominal = k * math.ceil(c3 * n * math.log(n))
    assert nominal / 3 <= snap.transmissions <= 3 * nominal


# --- update protocol --------------------------------------------------------


def test_update_trivial_two_nodes():
    g = path2()
    old = bytes.fromhex("aa" * 16)
    new = bytes.fromhex("17" * 16)
    snap = run_ltcds_i(g, {0: old}, ideal_soliton(1), 5.0, np.random.default_rng(3))
    updated = run_update(snap, g, {0: (old, new)}, 5.0, np.random.default_rng(4))
    assert all(p.payload == new for p in updated.packets)
    assert all(p.ids == frozenset({0}) for p in updated.packets)


def test_update_transmission_bound():
    g, sources, snap = make_run(n=60, k=6, side=3.5, c1=5.0, seed=2)
    picks = snap.source_ids[:3]
    updates = {s: (sources[s], bytes(16)) for s in picks}
    updated = run_update(snap, g, updates, 5.0, np.random.default_rng(5))
    bound = len(picks) * (math.ceil(5.0 * g.n * math.log(g.n)) + 1)
    assert updated.transmissions <= bound


def test_update_leaves_non_holders_unchanged():
    # hand-built snapshot on a 3-node path: only node 0 holds the id
    g = graph_from_points([[0.0, 0.0], [0.8, 0.0], [1.6, 0.0]], side_length=3.0)
    old = bytes([1]) * 4
    new = bytes([2]) * 4
    other = bytes([9]) * 4
    snap = StorageSnapshot(
        algorithm="ltcds1",
        n=3,
        k=1,
        side_length=3.0,
        source_ids=(0,),
        packets=(
            StoragePacket(ids=frozenset({0}), payload=old),
            StoragePacket(ids=frozenset(), payload=other),
            StoragePacket(ids=frozenset(), payload=other),
        ),
        code_degrees=(1, 0, 0),
        transmissions=0,
        rounds=0,
        final_counters={0: 0},
    )
    updated = run_update(snap, g, {0: (old, new)}, 3.0, np.random.default_rng(6))
    assert updated.packets[0].payload == new
    assert updated.packets[1].payload == other
    assert updated.packets[2].payload == other


def test_update_rejects_unknown_source():
    g, sources, snap = make_run(n=60, k=6, side=3.5, c1=3.0, seed=2)
    bogus = next(v for v in range(g.n) if v not in snap.source_ids)
    with pytest.raises(ParameterError):
        run_update(snap, g, {bogus: (bytes(16), bytes(16))}, 3.0, np.random.default_rng(0))


# --- walk statistics ---------------------------------------------------------


def test_walk_statistics_two_node_path():
    ws = measure_walk_statistics(path2(), 100_000, np.random.default_rng(6))
    assert ws.visit_frequency[0] == pytest.approx(0.5, abs=0.01)
    assert ws.visit_frequency[1] == pytest.approx(0.5, abs=0.01)
    assert ws.mean_return_time[0] == pytest.approx(2.0, rel=0.02)


def test_walk_statistics_match_degree_profile():
    g = connected_rgg(100, 5.0, 21)
    ws = measure_walk_statistics(g, 300_000, np.random.default_rng(5))
    deg = g.degrees
    two_e = deg.sum()
    mu_n = graph_stats(g).mean_degree * g.n
    for u in range(g.n):
        if ws.visit_counts[u] >= 100:
            expected = deg[u] / two_e
            assert abs(ws.visit_frequency[u] - expected) / expected <= 0.15
        if ws.return_counts[u] >= 100:
            expected = mu_n / deg[u]
            assert abs(ws.mean_return_time[u] - expected) / expected <= 0.15


def test_walk_statistics_preconditions():
    with pytest.raises(ParameterError):
        measure_walk_statistics(path2(), 10_000, np.random.default_rng(0))
    g = graph_from_points([[0.0, 0.0], [3.0, 0.0]])
    with pytest.raises(SimulationError):
        measure_walk_statistics(g, 100_000, np.random.default_rng(0))
