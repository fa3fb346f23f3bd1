"""Comparison protocols: hop-based directed random walk (HBDRW),
source-based restricted-flooding phantom routing (PUSBRF), and the plain
shortest-path control.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyRing, InvalidParameter
from .net import UNREACHABLE, Network
from .trace import (PHASE_PHANTOM_PATH, PHASE_SHORTEST, PHASE_WALK,
                    RouteTrace, stitch)


@dataclass(frozen=True)
class BaselineParams:
    """Walk length h shared by both baselines."""

    walk_hops: int

    def __post_init__(self):
        if self.walk_hops < 1:
            raise InvalidParameter(
                f"walk_hops must be >= 1, got {self.walk_hops}")


def hbdrw_route(network: Network, source: int, params: BaselineParams,
                rng: np.random.Generator) -> RouteTrace:
    """h-hop directed random walk, then shortest path from the endpoint.

    Each relay splits its neighbors into a parent set (smaller hop count)
    and a child set (larger hop count); the walk commits to one set kind
    for its whole length and picks uniformly inside it at every relay.
    An empty committed set at some relay falls back to the other set for
    that step; if both are empty the walk ends early.
    """
    _check_source(network, source)
    hops = network.hops

    committed_parent = bool(rng.integers(2) == 0)
    walk = [source]
    annotations: list[str] = []
    cur, prev = source, None
    for step in range(params.walk_hops):
        nbrs = network.neighbor_ids[cur]
        parents = nbrs[hops[nbrs] < hops[cur]]
        children = nbrs[hops[nbrs] > hops[cur]]
        primary, other = ((parents, children) if committed_parent
                          else (children, parents))
        cands = primary
        if len(cands) == 0:
            cands = other
            if len(cands) == 0:
                break
            annotations.append(f"walk-fallback@{step}")
        if prev is not None and len(cands) > 1:
            trimmed = cands[cands != prev]
            if len(trimmed):
                cands = trimmed
        prev, cur = cur, int(cands[int(rng.integers(len(cands)))])
        walk.append(cur)

    tail = shortest_path_route(network, cur) if cur != network.sink else None
    legs = [(walk, PHASE_WALK)]
    if tail is not None:
        legs.append((tail.hops, PHASE_SHORTEST))
    out = stitch(legs, delivered=True, annotations=annotations)
    out.phantom = cur if cur != source else None
    return out


def pusbrf_route(network: Network, source: int, params: BaselineParams,
                 rng: np.random.Generator,
                 source_hops: np.ndarray | None = None) -> RouteTrace:
    """Phantom drawn uniformly from the ring exactly h source-hops away.

    ``source_hops`` is the source-rooted flooding result; pass it in when
    routing many packets from one source to avoid recomputing the flood.
    The source-to-phantom leg descends that hop field, giving a minimum
    hop path of exactly h hops, and the phantom forwards to the sink on a
    shortest path.
    """
    _check_source(network, source)
    if source_hops is None:
        source_hops = network.hops_from(source)

    ring = np.flatnonzero(source_hops == params.walk_hops)
    ring = ring[ring != network.sink]
    if len(ring) == 0:
        raise EmptyRing(
            f"no node at exactly {params.walk_hops} hops from source {source}")
    phantom = int(ring[int(rng.integers(len(ring)))])

    # Walk the source-rooted hop field down from the phantom, then flip.
    pos = network.positions
    descend = [phantom]
    cur = phantom
    while source_hops[cur] > 0:
        nbrs = network.neighbor_ids[cur]
        down = nbrs[source_hops[nbrs] == source_hops[cur] - 1]
        d = np.linalg.norm(pos[down] - pos[source], axis=1)
        cur = int(down[int(np.argmin(d))])
        descend.append(cur)
    to_phantom = descend[::-1]

    legs = [(to_phantom, PHASE_PHANTOM_PATH)]
    if phantom != network.sink:
        tail = shortest_path_route(network, phantom)
        legs.append((tail.hops, PHASE_SHORTEST))
    out = stitch(legs, delivered=True)
    out.phantom = phantom
    return out


def shortest_path_route(network: Network, source: int) -> RouteTrace:
    """Minimum-hop route to the sink.

    Each relay forwards to a neighbor one hop closer to the sink, ties
    broken by Euclidean distance to the sink, so the trace length equals
    the source's hop count exactly.
    """
    _check_source(network, source, allow_sink=True)
    pos = network.positions
    hops = network.hops
    nodes = [source]
    cur = source
    while hops[cur] > 0:
        nbrs = network.neighbor_ids[cur]
        down = nbrs[hops[nbrs] == hops[cur] - 1]
        d = np.linalg.norm(pos[down] - network.sink_pos, axis=1)
        cur = int(down[int(np.argmin(d))])
        nodes.append(cur)
    return RouteTrace(hops=nodes, phases=[PHASE_SHORTEST] * len(nodes),
                      delivered=True)


def _check_source(network: Network, source: int, allow_sink: bool = False):
    network.check_node(source)
    if not allow_sink and source == network.sink:
        raise InvalidParameter("source must not be the sink")
    if network.hops[source] == UNREACHABLE:
        raise InvalidParameter(f"source {source} is unreachable from the sink")
