import numpy as np
import pytest

import phantomnet as pn
from phantomnet.config import ExperimentConfig
from phantomnet.harness import run_experiment


@pytest.fixture(scope="session")
def desk_net():
    """Reference-density field at desk scale."""
    return pn.deploy(2000, 2700.0, 100.0, 300.0, seed=2)


@pytest.fixture(scope="session")
def dense_net():
    """High-degree field used for the geometry-sensitive checks."""
    return pn.deploy(5000, 2000.0, 100.0, 300.0, seed=11)


@pytest.fixture(scope="session")
def small_net():
    """500-node field from the deployment examples."""
    return pn.deploy(500, 1500.0, 100.0, 300.0, seed=7)


@pytest.fixture(scope="session")
def sweep_rows():
    """Full default sweep, shared by the safety and overhead criteria."""
    cfg = ExperimentConfig(seeds=list(range(1, 31)), packets_per_run=400)
    return run_experiment(cfg)


def brute_force_adjacency(positions, r):
    """Quadratic all-pairs adjacency, the oracle for the grid index."""
    n = len(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    out = []
    for i in range(n):
        mask = d2[i] <= r * r
        mask[i] = False
        out.append(np.flatnonzero(mask))
    return out


def bfs_oracle(adjacency, root):
    """Plain dict-and-list BFS, independent of the package's flood."""
    from collections import deque
    dist = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            v = int(v)
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
