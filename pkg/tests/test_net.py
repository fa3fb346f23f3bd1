import numpy as np
import pytest

import phantomnet as pn
from phantomnet.errors import ConnectivityError, InvalidParameter, UnknownNode

from conftest import bfs_oracle, brute_force_adjacency


def test_deploy_two_nodes_all_adjacent():
    net = pn.deploy(2, 100.0, 200.0, 200.0, seed=0)
    assert len(net) == 3
    assert net.hops[1] == 1 and net.hops[2] == 1
    for i in (1, 2):
        assert pn.SINK in net.neighbor_ids[i]


def test_deploy_sink_at_center():
    net = pn.deploy(50, 600.0, 150.0, 450.0, seed=4)
    assert np.allclose(net.sink_pos, [300.0, 300.0])
    assert net.hops[pn.SINK] == 0


def test_deploy_reference_scale():
    net = pn.deploy(10_000, 6000.0, 100.0, 300.0, seed=1)
    assert len(net) == 10_001
    assert np.allclose(net.sink_pos, [3000.0, 3000.0])
    assert np.all(net.positions >= 0.0) and np.all(net.positions <= 6000.0)


@pytest.mark.parametrize("bad", [
    dict(n_nodes=1, field_side=100.0, r=10.0, r0=30.0),
    dict(n_nodes=10, field_side=0.0, r=10.0, r0=30.0),
    dict(n_nodes=10, field_side=100.0, r=0.0, r0=30.0),
    dict(n_nodes=10, field_side=100.0, r=10.0, r0=5.0),
])
def test_deploy_rejects_bad_parameters(bad):
    with pytest.raises(InvalidParameter):
        pn.deploy(seed=1, **bad)


def test_deploy_rejects_disconnected_field():
    # 40 nodes spread over 5000m with r=100m cannot all reach the sink.
    with pytest.raises(ConnectivityError):
        pn.deploy(40, 5000.0, 100.0, 300.0, seed=1)


def test_flood_matches_bfs_oracle(small_net):
    adj = brute_force_adjacency(small_net.positions, small_net.r)
    dist = bfs_oracle(adj, pn.SINK)
    for i in range(len(small_net)):
        expected = dist.get(i, pn.UNREACHABLE)
        assert small_net.hops[i] == expected


def test_flood_is_idempotent(small_net):
    assert np.array_equal(pn.flood(small_net), small_net.hops)


def test_sink_neighbors_have_hop_one(small_net):
    for j in small_net.neighbor_ids[pn.SINK]:
        assert small_net.hops[j] == 1


def test_adjacency_matches_brute_force(small_net):
    adj = brute_force_adjacency(small_net.positions, small_net.r)
    for i in range(len(small_net)):
        assert np.array_equal(small_net.neighbor_ids[i], np.sort(adj[i]))


def test_neighbor_symmetry_and_hop_lipschitz(small_net):
    for u in range(len(small_net)):
        for v in small_net.neighbor_ids[u]:
            assert u in small_net.neighbor_ids[v]
            if small_net.hops[u] != pn.UNREACHABLE:
                assert abs(small_net.hops[u] - small_net.hops[v]) <= 1


@pytest.mark.parametrize("seed", range(3))
def test_deterministic_deployment(seed):
    a = pn.deploy(400, 1000.0, 100.0, 300.0, seed=seed)
    b = pn.deploy(400, 1000.0, 100.0, 300.0, seed=seed)
    assert np.array_equal(a.positions, b.positions)
    assert np.array_equal(a.hops, b.hops)
    for i in range(len(a)):
        assert np.array_equal(a.neighbor_ids[i], b.neighbor_ids[i])


def test_neighbors_at_hop_sink(small_net):
    got = pn.neighbors_at_hop(small_net, pn.SINK, 1)
    assert np.array_equal(got, small_net.neighbor_ids[pn.SINK])


def test_neighbors_at_hop_filter_matches_scan(small_net):
    for node in (3, 57, 200):
        target = int(small_net.hops[node])
        got = set(pn.neighbors_at_hop(small_net, node, target).tolist())
        expected = {int(j) for j in small_net.neighbor_ids[node]
                    if small_net.hops[j] == target}
        assert got == expected


def test_neighbors_at_hop_can_be_empty(small_net):
    # A hop value no neighbor can have.
    assert len(pn.neighbors_at_hop(small_net, 3, 10_000)) == 0


def test_neighbors_at_hop_unknown_node(small_net):
    with pytest.raises(UnknownNode):
        pn.neighbors_at_hop(small_net, 10_000, 1)


def test_euclidean_hops(small_net):
    assert pn.euclidean_hops(small_net, 5, 5) == 0.0
    a, b = 10, 20
    expected = float(np.linalg.norm(small_net.positions[a]
                                    - small_net.positions[b])) / small_net.r
    assert pn.euclidean_hops(small_net, a, b) == pytest.approx(expected)
    with pytest.raises(UnknownNode):
        pn.euclidean_hops(small_net, 0, -1)


def test_exact_distance_three_hops():
    positions = np.array([[0.0, 0.0], [300.0, 0.0], [150.0, 0.0]])
    net = pn.Network(positions, r=100.0, r0=300.0, field_side=400.0, rng_seed=0)
    assert pn.euclidean_hops(net, 0, 1) == 3.0


def test_node_view_and_neighbor_table(small_net):
    node = small_net.node(12)
    assert node.id == 12
    assert node.hop_to_sink == small_net.hops[12]
    table = small_net.neighbor_table(12)
    assert len(table) == len(small_net.neighbor_ids[12])
    for nid, npos, nhop in table:
        assert np.linalg.norm(npos - node.pos) <= small_net.r
        assert nhop == small_net.hops[nid]


def test_network_dump_csv(small_net, tmp_path):
    path = tmp_path / "net.csv"
    small_net.dump_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "id,x,y,hop_to_sink,neighbor_count"
    assert len(lines) == len(small_net) + 1
    first = lines[1].split(",")
    assert first[0] == "0" and first[3] == "0"
