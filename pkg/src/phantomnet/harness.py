"""Experiment orchestration: seed sweeps, aggregation, and CSV emission.

Runs are independent (protocol x sweep point x seed) and may execute in
parallel; aggregation is a deterministic fold in config order, so the
output bytes never depend on scheduling. Set PHANTOMNET_THREADS to cap
the worker count (1 disables the process pool).
"""

from __future__ import annotations

import functools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis
from .adversary import run_session
from .baselines import BaselineParams
from .config import ExperimentConfig
from .errors import HarnessError, InvalidParameter
from .net import deploy
from .protocols import PROTOCOLS
from .psspr import SectorParams
from .trace import enters_visible_area

CSV_HEADER = ("protocol,h,H,mean_safety_time,mean_comm_overhead_hops,"
              "capture_rate,failure_path_rate,n_runs")


@dataclass(frozen=True)
class AggregateRow:
    protocol: str
    h: int
    H: int
    mean_safety_time: float
    mean_comm_overhead_hops: float
    capture_rate: float
    failure_path_rate: float
    n_runs: int


@dataclass(frozen=True)
class RunSpec:
    """Everything one worker needs to reproduce a single run."""

    protocol: str
    h: int
    H: int
    seed: int
    n_nodes: int
    field_side: float
    r: float
    r0: float
    omega: int
    packets: int


@dataclass(frozen=True)
class RunResult:
    safety_time: int
    captured: bool
    packets_sent: int
    total_hops: int
    failure_paths: int


@functools.lru_cache(maxsize=4)
def _network(n_nodes: int, field_side: float, r: float, r0: float, seed: int):
    return deploy(n_nodes, field_side, r, r0, seed)


def pick_source(network, H: int, seed: int) -> int:
    """Uniform choice among reachable nodes with hop count within H +- 1.

    Seeded by (deployment seed, H) only, so every protocol at a sweep
    point sees the same source on the same field.
    """
    hops = network.hops
    ids = network.reachable_sensor_ids()
    cands = ids[np.abs(hops[ids] - H) <= 1]
    if len(cands) == 0:
        raise InvalidParameter(
            f"no node within one hop of target distance H={H}")
    rng = np.random.default_rng([seed, H, 101])
    return int(cands[int(rng.integers(len(cands)))])


def run_one(spec: RunSpec) -> RunResult:
    network = _network(spec.n_nodes, spec.field_side, spec.r, spec.r0,
                       spec.seed)
    source = pick_source(network, spec.H, spec.seed)
    sector = SectorParams(*analysis.rmin_rmax_for(spec.h), omega=spec.omega)
    walk = BaselineParams(walk_hops=spec.h)
    rng = np.random.default_rng([spec.seed, spec.H, spec.h,
                                 PROTOCOLS.index(spec.protocol)])

    stats = {"packets": 0, "failures": 0}

    def on_trace(trace):
        stats["packets"] += 1
        if enters_visible_area(trace, network, source):
            stats["failures"] += 1

    metrics = run_session(network, spec.protocol, source, spec.packets, rng,
                          sector_params=sector, walk_params=walk,
                          on_trace=on_trace)
    return RunResult(safety_time=metrics.safety_time,
                     captured=metrics.captured,
                     packets_sent=stats["packets"],
                     total_hops=metrics.total_hops,
                     failure_paths=stats["failures"])


def run_experiment(config: ExperimentConfig,
                   max_workers: int | None = None) -> list[AggregateRow]:
    """Execute the full sweep and aggregate per (protocol, sweep point).

    Individual run failures are tolerated up to 10% of the grid; beyond
    that the experiment aborts with HarnessError.
    """
    config.validate()
    specs = [
        RunSpec(protocol=p, h=h, H=H, seed=seed, n_nodes=config.n_nodes,
                field_side=config.field_side, r=config.r, r0=config.r0,
                omega=config.omega, packets=config.packets_per_run)
        for p in config.protocols
        for (h, H) in config.sweep_points
        for seed in config.seeds
    ]

    if max_workers is None:
        max_workers = int(os.environ.get("PHANTOMNET_THREADS", "1"))
    results: list[RunResult | Exception] = []
    if max_workers > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            futures = [pool.submit(run_one, s) for s in specs]
            for fut in futures:
                try:
                    results.append(fut.result())
                except Exception as exc:  # noqa: BLE001 - recorded per run
                    results.append(exc)
    else:
        for s in specs:
            try:
                results.append(run_one(s))
            except Exception as exc:  # noqa: BLE001 - recorded per run
                results.append(exc)

    failures = sum(1 for r in results if isinstance(r, Exception))
    if failures > 0.10 * len(specs):
        first = next(r for r in results if isinstance(r, Exception))
        raise HarnessError(
            f"{failures}/{len(specs)} runs failed; first error: {first}")

    rows: list[AggregateRow] = []
    n_seeds = len(config.seeds)
    idx = 0
    for p in config.protocols:
        for (h, H) in config.sweep_points:
            chunk = results[idx:idx + n_seeds]
            idx += n_seeds
            ok = [r for r in chunk if isinstance(r, RunResult)]
            if not ok:
                raise HarnessError(f"every run failed for {p} at h={h} H={H}")
            rows.append(AggregateRow(
                protocol=p, h=h, H=H,
                mean_safety_time=float(np.mean([r.safety_time for r in ok])),
                mean_comm_overhead_hops=float(np.mean(
                    [r.total_hops / r.packets_sent for r in ok])),
                capture_rate=float(np.mean([r.captured for r in ok])),
                failure_path_rate=float(np.mean(
                    [r.failure_paths / r.packets_sent for r in ok])),
                n_runs=len(ok),
            ))
    return rows


def emit_csv(rows: list[AggregateRow], path: str) -> None:
    """Write aggregate rows with a fixed header and 6-decimal floats."""
    if not rows:
        raise InvalidParameter("refusing to write an empty results file")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(f"{row.protocol},{row.h},{row.H},"
                     f"{row.mean_safety_time:.6f},"
                     f"{row.mean_comm_overhead_hops:.6f},"
                     f"{row.capture_rate:.6f},"
                     f"{row.failure_path_rate:.6f},"
                     f"{row.n_runs}\n")
