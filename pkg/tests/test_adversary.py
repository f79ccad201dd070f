import numpy as np
import pytest

from ksrobust.adversary import (NODE_STRATEGIES, Z2_STRATEGIES,
                                CorruptionRecord, corrupt_nodes, corrupt_z2,
                                erasure_adversary)
from ksrobust.model import sample_z2

from conftest import make_sbm


def edge_set(graph, subset=None):
    if subset is not None:
        mask = np.zeros(graph.n, dtype=bool)
        mask[subset] = True
        keep = mask[graph.edges[:, 0]] & mask[graph.edges[:, 1]]
        edges = graph.edges[keep]
    else:
        edges = graph.edges
    return {(int(u), int(v)) for u, v in edges}


@pytest.mark.parametrize("strategy", NODE_STRATEGIES)
def test_mu_zero_is_identity(strategy):
    graph, labels, rng = make_sbm(100, 8.0, 0.5, seed=0)
    out, record = corrupt_nodes(graph, labels, strategy, 0.0, rng)
    assert record.corrupted.size == 0
    assert edge_set(out) == edge_set(graph)
    assert out.n == graph.n


@pytest.mark.parametrize("strategy", NODE_STRATEGIES)
def test_untouched_submatrix_preserved(strategy):
    graph, labels, rng = make_sbm(200, 8.0, 0.6, seed=1)
    out, record = corrupt_nodes(graph, labels, strategy, 0.1, rng)
    assert record.corrupted.size == 20
    assert np.array_equal(record.corrupted, np.unique(record.corrupted))
    honest = np.setdiff1d(np.arange(200), record.corrupted)
    assert edge_set(out, honest) == edge_set(graph, honest)


def test_budget_is_floor_of_mu_n():
    graph, labels, rng = make_sbm(103, 6.0, 0.5, seed=2)
    _, record = corrupt_nodes(graph, labels, "stealth-rewire", 0.07, rng)
    assert record.corrupted.size == int(np.floor(0.07 * 103))
    mask = record.mask(103)
    assert mask.sum() == record.corrupted.size
    assert np.all(mask[record.corrupted])


def test_stealth_rewires_into_opposite_community():
    graph, labels, rng = make_sbm(200, 8.0, 0.6, seed=3)
    out, record = corrupt_nodes(graph, labels, "stealth-rewire", 0.1, rng)
    adj = out.adjacency
    d_hat = graph.mean_degree
    for v in record.corrupted:
        nbrs = adj[[v], :].nonzero()[1]
        assert np.all(labels[nbrs] == -labels[v])
    deg = out.degrees[record.corrupted]
    # Poisson(d_hat) reattachment keeps degrees plausible, nothing flood-like
    assert 0.3 * d_hat <= deg.mean() <= 3.0 * d_hat
    assert deg.max() < out.n // 4


def test_flood_creates_heavy_vertices():
    graph, labels, rng = make_sbm(200, 8.0, 0.6, seed=4)
    out, record = corrupt_nodes(graph, labels, "degree-flood", 0.05, rng)
    deg = out.degrees
    assert deg[record.corrupted].min() >= 0.4 * out.n
    honest = np.setdiff1d(np.arange(200), record.corrupted)
    assert np.median(deg[honest]) < 0.2 * out.n


def test_sign_flip_reverses_community_preference():
    graph, labels, rng = make_sbm(400, 12.0, 0.8, seed=5)
    out, record = corrupt_nodes(graph, labels, "sign-flip", 0.05, rng)
    adj = out.adjacency
    same = opposite = 0
    for v in record.corrupted:
        nbrs = adj[[v], :].nonzero()[1]
        same += int(np.sum(labels[nbrs] == labels[v]))
        opposite += int(np.sum(labels[nbrs] == -labels[v]))
    # the flipped row prefers the opposite community by roughly (1+e)/(1-e)
    assert opposite > 3 * same


def test_unknown_strategy_rejected():
    graph, labels, rng = make_sbm(50, 5.0, 0.5, seed=6)
    with pytest.raises(ValueError):
        corrupt_nodes(graph, labels, "chaos", 0.1, rng)
    with pytest.raises(ValueError):
        corrupt_nodes(graph, labels, "stealth-rewire", 1.0, rng)
    with pytest.raises(ValueError):
        corrupt_nodes(graph, labels, "stealth-rewire", -0.1, rng)


def test_record_json_roundtrip():
    rec = CorruptionRecord(mu=0.05, corrupted=np.array([3, 7, 11]),
                           strategy="degree-flood")
    back = CorruptionRecord.from_json(rec.to_json())
    assert back.mu == rec.mu
    assert back.strategy == rec.strategy
    assert np.array_equal(back.corrupted, rec.corrupted)


def test_erasure_identity_at_zero():
    graph, _, rng = make_sbm(60, 6.0, 0.5, seed=7)
    sub, index_map = erasure_adversary(graph, 0.0, rng)
    assert np.array_equal(index_map, np.arange(60))
    assert edge_set(sub) == edge_set(graph)


def test_erasure_keeps_induced_subgraph():
    graph, _, rng = make_sbm(50, 6.0, 0.5, seed=8)
    sub, index_map = erasure_adversary(graph, 0.3, rng)
    assert index_map.size == 50 - int(np.floor(0.3 * 50))
    assert np.all(np.diff(index_map) > 0)
    # mapping sub edges back through the index map recovers original edges
    mapped = {(int(index_map[u]), int(index_map[v])) for u, v in sub.edges}
    assert mapped == edge_set(graph, index_map)
    with pytest.raises(ValueError):
        erasure_adversary(graph, 1.0, rng)


@pytest.mark.parametrize("strategy", Z2_STRATEGIES)
def test_z2_untouched_block_bitwise(strategy):
    rng = np.random.default_rng(9)
    labels = np.where(rng.random(120) < 0.5, 1, -1)
    inst = sample_z2(120, 2.0, labels, rng)
    out, record = corrupt_z2(inst, strategy, 0.1, rng)
    assert record.corrupted.size == 12
    honest = np.setdiff1d(np.arange(120), record.corrupted)
    block = np.ix_(honest, honest)
    assert np.array_equal(out.matrix[block], inst.matrix[block])
    assert np.array_equal(out.matrix, out.matrix.T)


def test_z2_zero_out_zeroes_touched_rows():
    rng = np.random.default_rng(10)
    labels = np.where(rng.random(80) < 0.5, 1, -1)
    inst = sample_z2(80, 1.5, labels, rng)
    out, record = corrupt_z2(inst, "zero-out", 0.2, rng)
    assert np.all(out.matrix[record.corrupted, :] == 0.0)
    assert np.all(out.matrix[:, record.corrupted] == 0.0)


def test_z2_anti_signal_flips_alignment():
    rng = np.random.default_rng(11)
    n = 200
    labels = np.where(rng.random(n) < 0.5, 1, -1)
    inst = sample_z2(n, 2.0, labels, rng)
    out, record = corrupt_z2(inst, "anti-signal", 0.1, rng)
    bad = record.mask(n)
    touched = np.outer(bad, ~bad)
    aligned = out.matrix * np.outer(labels, labels)
    # corrupted rows now carry -sigma signal: mean alignment clearly negative
    assert aligned[touched].mean() < -1.0
    assert aligned[np.outer(~bad, ~bad) & ~np.eye(n, dtype=bool)].mean() > 1.0


def test_z2_mu_zero_copies():
    rng = np.random.default_rng(12)
    labels = np.where(rng.random(40) < 0.5, 1, -1)
    inst = sample_z2(40, 1.0, labels, rng)
    out, record = corrupt_z2(inst, "spike-plant", 0.0, rng)
    assert record.corrupted.size == 0
    assert np.array_equal(out.matrix, inst.matrix)
    assert out.matrix is not inst.matrix
    with pytest.raises(ValueError):
        corrupt_z2(inst, "bogus", 0.1, rng)
