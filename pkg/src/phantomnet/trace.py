"""Per-packet route records shared by every routing protocol."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Phase tags of the sector-phantom pipeline.
PHASE_DIRECT = "direct-to-sink"
PHASE_DIRECTED = "directed"
PHASE_SAME_HOP = "same-hop"
PHASE_VAR_ANGLE = "variable-angle"

# Phase tags used by the baseline protocols.
PHASE_WALK = "random-walk"
PHASE_PHANTOM_PATH = "phantom-path"
PHASE_SHORTEST = "shortest-path"


@dataclass
class RouteTrace:
    """Ordered node sequence for one packet.

    ``phases[i]`` tags the phase that delivered the packet to ``hops[i]``
    (the first entry carries the tag of the first phase). ``phantom`` is
    the node id the protocol used as its decoy destination, when it has
    one. Undelivered packets keep their partial trace.
    """

    hops: list[int]
    phases: list[str]
    delivered: bool
    annotations: list[str] = field(default_factory=list)
    phantom: int | None = None
    choice: object | None = None  # PhantomChoice for sector-phantom packets

    def __post_init__(self):
        if len(self.hops) != len(self.phases):
            raise ValueError("hops and phases must have equal length")

    @property
    def transmissions(self) -> int:
        """Number of radio transmissions the packet consumed."""
        return max(0, len(self.hops) - 1)

    def csv_rows(self, packet_id: int = 0) -> list[str]:
        """``packet_id,hop_index,node_id,phase`` rows for trace dumps."""
        return [f"{packet_id},{i},{node},{phase}"
                for i, (node, phase) in enumerate(zip(self.hops, self.phases))]


def stitch(legs: list[tuple[list[int], str]], delivered: bool,
           annotations: list[str] | None = None) -> RouteTrace:
    """Concatenate routing legs, dropping each leg's duplicated start node."""
    hops: list[int] = []
    phases: list[str] = []
    for nodes, phase in legs:
        if not nodes:
            continue
        if hops and nodes[0] == hops[-1]:
            nodes = nodes[1:]
        elif not hops:
            hops.append(nodes[0])
            phases.append(phase)
            nodes = nodes[1:]
        hops.extend(nodes)
        phases.extend([phase] * len(nodes))
    return RouteTrace(hops=hops, phases=phases, delivered=delivered,
                      annotations=list(annotations or []))


def phantom_onset(trace: RouteTrace, network) -> int | None:
    """Index where the phantom-to-sink leg of a trace starts.

    The leg begins the first time the packet comes within one
    communication radius of its phantom. A packet that never got there
    has no phantom leg (None); one without a phantom at all (plain
    shortest path) forwards sink-ward from the source itself.
    """
    if not trace.hops:
        return None
    if trace.phantom is None:
        return 0
    ppos = network.positions[trace.phantom]
    d = np.linalg.norm(network.positions[np.array(trace.hops)] - ppos, axis=1)
    near = np.flatnonzero(d <= network.r)
    return int(near[0]) if len(near) else None


def enters_visible_area(trace: RouteTrace, network, source: int) -> bool:
    """True when the phantom-to-sink leg passes within r0 of the source.

    A failure path is a phantom-to-sink transmission path crossing the
    source's visible area; packets whose phantom leg never materialized
    cannot produce one.
    """
    start = phantom_onset(trace, network)
    if start is None:
        return False
    seg = np.array(trace.hops[start:], dtype=np.int64)
    if len(seg) == 0:
        return False
    d = np.linalg.norm(network.positions[seg] - network.positions[source], axis=1)
    return bool(np.any(d <= network.r0))
