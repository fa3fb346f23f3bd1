"""Sensor field deployment, radius-r adjacency, and sink-rooted hop counts.

The sink always gets node id 0 and sits at the exact field center; sensor
nodes get ids 1..n. Hop counts are assigned by breadth-first flooding from
the sink, which is exactly the minimum-hop-count beacon exchange a real
deployment would run at startup.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConnectivityError, InvalidParameter, UnknownNode

SINK = 0

# Hop sentinel for nodes the sink flood never reached.
UNREACHABLE = -1


@dataclass(frozen=True)
class SensorNode:
    """Read-only view of one deployed node."""

    id: int
    pos: np.ndarray            # (x, y) in meters
    hop_to_sink: int           # UNREACHABLE if the flood never arrived
    neighbors: np.ndarray      # ids of nodes within communication radius


class Network:
    """Immutable deployed field.

    Holds node positions, the radius-r neighbor tables, and the flooded
    minimum hop counts. Instances must not be mutated after construction
    and can be shared read-only across concurrently executing runs.
    """

    def __init__(self, positions: np.ndarray, r: float, r0: float,
                 field_side: float, rng_seed: int):
        self.positions = np.asarray(positions, dtype=np.float64)
        self.positions.setflags(write=False)
        self.r = float(r)
        self.r0 = float(r0)
        self.field_side = float(field_side)
        self.rng_seed = rng_seed
        self.sink = SINK
        self.neighbor_ids = _build_adjacency(self.positions, self.r)
        self.hops = _bfs_hops(self.neighbor_ids, SINK)
        self.hops.setflags(write=False)
        self.kdtree = cKDTree(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    @property
    def n_sensors(self) -> int:
        return len(self.positions) - 1

    @property
    def sink_pos(self) -> np.ndarray:
        return self.positions[SINK]

    def check_node(self, node: int) -> None:
        if not 0 <= node < len(self.positions):
            raise UnknownNode(f"node id {node} not in network of {len(self)} nodes")

    def node(self, node: int) -> SensorNode:
        self.check_node(node)
        return SensorNode(
            id=node,
            pos=self.positions[node],
            hop_to_sink=int(self.hops[node]),
            neighbors=self.neighbor_ids[node],
        )

    def neighbor_table(self, node: int) -> list[tuple[int, np.ndarray, int]]:
        """(id, position, hop count) triplets, one per neighbor.

        Mirrors what a node learns from its neighbors' beacon messages.
        """
        self.check_node(node)
        return [(int(j), self.positions[j], int(self.hops[j]))
                for j in self.neighbor_ids[node]]

    def hops_from(self, node: int) -> np.ndarray:
        """Minimum hop counts of every node measured from ``node``.

        This is the restricted-flooding view a source builds for itself;
        it is recomputed on every call, so cache it when routing many
        packets from the same source.
        """
        self.check_node(node)
        return _bfs_hops(self.neighbor_ids, node)

    def reachable_sensor_ids(self) -> np.ndarray:
        """Sensor ids (sink excluded) that the sink flood reached."""
        ids = np.flatnonzero(self.hops != UNREACHABLE)
        return ids[ids != SINK]

    def dump_csv(self, path) -> None:
        """One row per node: id, x, y, hop_to_sink, neighbor_count."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("id,x,y,hop_to_sink,neighbor_count\n")
            for i in range(len(self.positions)):
                x, y = self.positions[i]
                fh.write(f"{i},{x:.6f},{y:.6f},{int(self.hops[i])},"
                         f"{len(self.neighbor_ids[i])}\n")


def deploy(n_nodes: int, field_side: float, r: float, r0: float,
           seed: int) -> Network:
    """Place ``n_nodes`` uniformly at random and flood hop counts.

    The sink is added at the exact field center on top of the requested
    sensor count. Raises ConnectivityError when more than 1% of sensors
    are unreachable from the sink, which signals that the density is too
    low for the requested communication radius.
    """
    if n_nodes < 2:
        raise InvalidParameter(f"n_nodes must be >= 2, got {n_nodes}")
    if field_side <= 0:
        raise InvalidParameter(f"field_side must be positive, got {field_side}")
    if r <= 0:
        raise InvalidParameter(f"r must be positive, got {r}")
    if r0 < r:
        raise InvalidParameter(f"r0 must be >= r, got r0={r0} r={r}")

    rng = np.random.default_rng(seed)
    sensor_pos = rng.uniform(0.0, field_side, size=(n_nodes, 2))
    center = np.array([field_side / 2.0, field_side / 2.0])
    positions = np.vstack([center[None, :], sensor_pos])

    net = Network(positions, r, r0, field_side, seed)
    unreachable = int(np.sum(net.hops[1:] == UNREACHABLE))
    if unreachable > 0.01 * n_nodes:
        raise ConnectivityError(
            f"{unreachable} of {n_nodes} nodes unreachable from sink "
            f"(limit is 1%); increase density or radius")
    return net


def flood(network: Network) -> np.ndarray:
    """Recompute minimum hop counts from the sink over the neighbor graph.

    Equivalent to the beacon flood run at construction; returned array
    matches ``network.hops`` exactly.
    """
    return _bfs_hops(network.neighbor_ids, network.sink)


def neighbors_at_hop(network: Network, node: int, target_hop: int) -> np.ndarray:
    """Subset of ``node``'s neighbors whose hop count equals ``target_hop``."""
    network.check_node(node)
    nbrs = network.neighbor_ids[node]
    return nbrs[network.hops[nbrs] == target_hop]


def euclidean_hops(network: Network, a: int, b: int) -> float:
    """Euclidean distance between two nodes expressed in hop units."""
    network.check_node(a)
    network.check_node(b)
    return float(np.linalg.norm(network.positions[a] - network.positions[b])
                 / network.r)


def _build_adjacency(positions: np.ndarray, r: float) -> list[np.ndarray]:
    """Radius-r adjacency lists via a uniform grid with cell size r.

    Identical results to the naive all-pairs scan but O(n) at the
    densities this simulator runs at.
    """
    n = len(positions)
    cells = np.floor(positions / r).astype(np.int64)
    grid: dict[tuple[int, int], list[int]] = {}
    for i in range(n):
        grid.setdefault((cells[i, 0], cells[i, 1]), []).append(i)

    r2 = r * r
    out: list[np.ndarray] = []
    for i in range(n):
        cx, cy = cells[i]
        cand: list[int] = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                cand.extend(grid.get((cx + dx, cy + dy), ()))
        cand_arr = np.array(cand, dtype=np.int64)
        diff = positions[cand_arr] - positions[i]
        mask = (diff[:, 0] ** 2 + diff[:, 1] ** 2) <= r2
        nbrs = cand_arr[mask]
        nbrs = np.sort(nbrs[nbrs != i])
        nbrs.setflags(write=False)
        out.append(nbrs)
    return out


def _bfs_hops(neighbor_ids: list[np.ndarray], root: int) -> np.ndarray:
    hops = np.full(len(neighbor_ids), UNREACHABLE, dtype=np.int64)
    hops[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        d = hops[u] + 1
        for v in neighbor_ids[u]:
            if hops[v] == UNREACHABLE:
                hops[v] = d
                queue.append(int(v))
    return hops
