import numpy as np
import pytest

import phantomnet as pn
from phantomnet.adversary import initial_state
from phantomnet.errors import InvalidParameter
from phantomnet.trace import PHASE_SHORTEST, RouteTrace


def two_node_net():
    """Sink plus one sensor within range of it."""
    positions = np.array([[500.0, 500.0], [560.0, 500.0]])
    return pn.Network(positions, r=100.0, r0=100.0, field_side=1000.0,
                      rng_seed=0)


def test_one_hop_capture():
    net = two_node_net()
    state = initial_state(net)
    trace = RouteTrace(hops=[1, pn.SINK], phases=[PHASE_SHORTEST] * 2,
                       delivered=True)
    state = pn.observe_packet(net, state, trace)
    assert state.at == 1
    assert state.moves == 1
    assert state.captured


def test_out_of_range_trace_leaves_state_unchanged(dense_net):
    state = initial_state(dense_net)
    # A far-corner source two hops from its neighbor; both far from sink.
    ids = dense_net.reachable_sensor_ids()
    far = ids[np.linalg.norm(dense_net.positions[ids] - dense_net.sink_pos,
                             axis=1) > 900]
    a = int(far[0])
    b = int(dense_net.neighbor_ids[a][0])
    trace = RouteTrace(hops=[a, b], phases=[PHASE_SHORTEST] * 2,
                       delivered=False)
    new = pn.observe_packet(dense_net, state, trace)
    assert new.at == state.at and new.moves == 0 and not new.captured


def test_backtrace_progression_matches_path_oracle():
    # With r0 = r the capture point is essentially the source itself;
    # the same shortest path repeats every packet, so each packet pulls
    # the adversary exactly one hop backward.
    net = pn.deploy(500, 1500.0, 100.0, 100.0, seed=7)
    ids = net.reachable_sensor_ids()
    src = int(ids[np.argmax(net.hops[ids])])
    H = int(net.hops[src])
    rng = np.random.default_rng(1)
    metrics = pn.run_session(net, "shortest-path", src, 200, rng)
    assert metrics.captured
    assert abs(metrics.safety_time - H) <= 2


def test_adversary_never_teleports(desk_net):
    src = pn.pick_source(desk_net, 15, 2)
    router = pn.make_router(desk_net, "psspr", src,
                            sector_params=pn.SectorParams(8, 12, 6))
    rng = np.random.default_rng(4)
    state = initial_state(desk_net)
    for _ in range(80):
        trace = router(rng)
        new = pn.observe_packet(desk_net, state, trace, source=src)
        if new.moves > state.moves:
            jump = np.linalg.norm(desk_net.positions[new.at]
                                  - desk_net.positions[state.at])
            assert jump <= desk_net.r
            assert new.moves == state.moves + 1
        else:
            assert new.at == state.at
        state = new
        if state.captured:
            break


def test_capture_is_monotone(desk_net):
    src = int(desk_net.neighbor_ids[pn.SINK][0])
    state = initial_state(desk_net)
    trace = pn.shortest_path_route(desk_net, src)
    state = pn.observe_packet(desk_net, state, trace)
    assert state.captured
    after = pn.observe_packet(desk_net, state, trace)
    assert after.captured and after.at == state.at


def test_capture_definition_radius(desk_net):
    # Capture fires exactly when the adversary stands within r0 of the
    # source or on it.
    src = pn.pick_source(desk_net, 10, 2)
    router = pn.make_router(desk_net, "shortest-path", src)
    rng = np.random.default_rng(0)
    state = initial_state(desk_net)
    for _ in range(100):
        state = pn.observe_packet(desk_net, state, router(rng), source=src)
        d = np.linalg.norm(desk_net.positions[state.at]
                           - desk_net.positions[src])
        assert state.captured == (state.at == src or d <= desk_net.r0)
        if state.captured:
            break
    assert state.captured


def test_run_session_rejects_zero_packets(desk_net):
    src = pn.pick_source(desk_net, 10, 2)
    with pytest.raises(InvalidParameter):
        pn.run_session(desk_net, "shortest-path", src, 0,
                       np.random.default_rng(0))


def test_single_packet_adjacent_source():
    net = two_node_net()
    metrics = pn.run_session(net, "shortest-path", 1, 1,
                             np.random.default_rng(0))
    assert metrics.safety_time == 1
    assert metrics.captured


def test_shortest_path_capture_bound(desk_net):
    src = pn.pick_source(desk_net, 20, 2)
    metrics = pn.run_session(desk_net, "shortest-path", src, 400,
                             np.random.default_rng(0))
    assert metrics.captured
    assert metrics.safety_time <= 25


def test_psspr_beats_shortest_path_paired_seeds():
    wins = 0
    for seed in range(1, 51):
        net = pn.deploy(700, 1500.0, 100.0, 300.0, seed=seed + 1000)
        ids = net.reachable_sensor_ids()
        cands = ids[np.abs(net.hops[ids] - 8) <= 1]
        src = int(cands[0])
        rng_a = np.random.default_rng([seed, 1])
        rng_b = np.random.default_rng([seed, 1])
        sp = pn.run_session(net, "shortest-path", src, 300, rng_a)
        ps = pn.run_session(net, "psspr", src, 300, rng_b,
                            sector_params=pn.SectorParams(4, 6, 6))
        wins += ps.safety_time > sp.safety_time
    assert wins >= 48  # 95% of 50 seeds


def test_session_determinism(desk_net):
    src = pn.pick_source(desk_net, 15, 2)
    kw = dict(sector_params=pn.SectorParams(8, 12, 6))
    a = pn.run_session(desk_net, "psspr", src, 50,
                       np.random.default_rng(42), **kw)
    b = pn.run_session(desk_net, "psspr", src, 50,
                       np.random.default_rng(42), **kw)
    assert a == b


def test_metrics_bookkeeping(desk_net):
    src = pn.pick_source(desk_net, 10, 2)
    seen = []
    metrics = pn.run_session(desk_net, "pusbrf", src, 30,
                             np.random.default_rng(3),
                             walk_params=pn.BaselineParams(5),
                             on_trace=seen.append)
    assert len(seen) == metrics.safety_time if metrics.captured else 30
    assert metrics.total_hops == sum(t.transmissions for t in seen)
    assert metrics.delivered == sum(t.delivered for t in seen)
