"""Protocol dispatch: build a per-session packet router for any protocol."""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import baselines, psspr
from .errors import InvalidParameter
from .net import Network
from .trace import RouteTrace

PSSPR = "psspr"
HBDRW = "hbdrw"
PUSBRF = "pusbrf"
SHORTEST_PATH = "shortest-path"

PROTOCOLS = (PSSPR, HBDRW, PUSBRF, SHORTEST_PATH)

Router = Callable[[np.random.Generator], RouteTrace]


def make_router(network: Network, protocol: str, source: int,
                sector_params: psspr.SectorParams | None = None,
                walk_params: baselines.BaselineParams | None = None) -> Router:
    """Closure routing one packet per call with per-source state prebuilt.

    The sector-phantom router reuses the source frame and candidate
    domains for the whole session; the restricted-flooding router reuses
    the source-rooted hop field.
    """
    if protocol == PSSPR:
        if sector_params is None:
            raise InvalidParameter("psspr requires sector_params")
        frame = psspr.build_frame(network, source)
        if frame.source_sink_distance <= network.r:
            domains = None  # direct sends never consult the domain
        else:
            domains = psspr.candidate_domain(network, frame, sector_params)

        def route(rng: np.random.Generator) -> RouteTrace:
            return psspr.route_packet(network, frame, sector_params, rng,
                                      domains=domains)
        return route

    if protocol == HBDRW:
        if walk_params is None:
            raise InvalidParameter("hbdrw requires walk_params")

        def route(rng: np.random.Generator) -> RouteTrace:
            return baselines.hbdrw_route(network, source, walk_params, rng)
        return route

    if protocol == PUSBRF:
        if walk_params is None:
            raise InvalidParameter("pusbrf requires walk_params")
        source_hops = network.hops_from(source)

        def route(rng: np.random.Generator) -> RouteTrace:
            return baselines.pusbrf_route(network, source, walk_params, rng,
                                          source_hops=source_hops)
        return route

    if protocol == SHORTEST_PATH:
        def route(rng: np.random.Generator) -> RouteTrace:
            return baselines.shortest_path_route(network, source)
        return route

    raise InvalidParameter(
        f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")
