"""Command line entry points.

Subcommands:
  simulate  run a configured experiment sweep and write the results CSV
  tables    print the three reference tables (optionally as CSV files)
  analyze   evaluate the closed-form security/overhead metrics
  trace     route one packet and dump the annotated trace as CSV rows

Exit codes: 0 success, 1 usage/validation errors, 2 runtime errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import analysis
from .baselines import BaselineParams
from .config import DEFAULTS, ExperimentConfig, load_config
from .errors import (InvalidParameter, ParseError, PhantomNetError,
                     ValidationError)
from .harness import emit_csv, pick_source, run_experiment
from .net import deploy
from .protocols import PROTOCOLS, make_router
from .psspr import SectorParams


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phantomnet",
                     description="Sensor-network source-location-privacy "
                                 "routing simulator and analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="run an experiment sweep")
    p_sim.add_argument("--config", required=True, help="key = value config file")
    p_sim.add_argument("--out", help="override the config output_path")

    p_tab = sub.add_parser("tables", help="print the reference tables")
    p_tab.add_argument("--csv-dir", help="also write table2/3/4.csv here")

    p_ana = sub.add_parser("analyze", help="evaluate the closed-form metrics")
    p_ana.add_argument("--h", type=int, required=True, help="directed hop count")
    p_ana.add_argument("--H", type=int, default=60, help="source-sink hops")
    p_ana.add_argument("--rmin", type=int, help="annulus inner radius, hops")
    p_ana.add_argument("--rmax", type=int, help="annulus outer radius, hops")
    p_ana.add_argument("--r0", type=float, default=3.0,
                       help="visible-area radius, hops")
    p_ana.add_argument("--omega", type=int, default=6, help="sector count")

    p_tr = sub.add_parser("trace", help="dump one annotated packet trace")
    p_tr.add_argument("--protocol", required=True, choices=PROTOCOLS)
    p_tr.add_argument("--seed", type=int, default=1)
    p_tr.add_argument("--h", type=int, default=10)
    p_tr.add_argument("--H", type=int, default=15)
    p_tr.add_argument("--omega", type=int, default=DEFAULTS["omega"])
    p_tr.add_argument("--n-nodes", type=int, default=DEFAULTS["n_nodes"])
    p_tr.add_argument("--field-side", type=float, default=DEFAULTS["field_side"])
    p_tr.add_argument("--r", type=float, default=DEFAULTS["r"])
    p_tr.add_argument("--r0", type=float, default=DEFAULTS["r0"])
    p_tr.add_argument("--network-out", help="dump the deployed field as CSV")
    return parser


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.out:
        config.output_path = args.out
    rows = run_experiment(config)
    emit_csv(rows, config.output_path)
    print(f"wrote {len(rows)} aggregate rows to {config.output_path}")
    return 0


def cmd_tables(args) -> int:
    tables = analysis.make_tables()
    print("Random directed path ratios (%)")
    print(f"{'h':>3} {'Rmin':>5} {'Rmax':>5} {'HBDRW/PUSBRF':>13} {'PUSBRF/PSSPR':>13}")
    for r in tables.table2:
        print(f"{r.h:>3} {r.r_min:>5} {r.r_max:>5} "
              f"{r.hbdrw_over_pusbrf:>13.2f} {r.pusbrf_over_psspr:>13.2f}")
    print()
    print("Phantom-to-source distance (hops; annulus Monte-Carlo vs printed form)")
    print(f"{'h':>3} {'Rmin':>5} {'Rmax':>5} {'D_mc':>8} {'D_printed':>10}")
    for r in tables.table3:
        print(f"{r.h:>3} {r.r_min:>5} {r.r_max:>5} "
              f"{r.distance_mc:>8.2f} {r.distance_printed:>10.2f}")
    print()
    print("Phantom node counts")
    print(f"{'h':>3} {'Rmin':>5} {'Rmax':>5} {'N_HBDRW':>9} {'N_PUSBRF':>9} {'N_PSSPR':>9}")
    for r in tables.table4:
        print(f"{r.h:>3} {r.r_min:>5} {r.r_max:>5} "
              f"{r.n_hbdrw:>9.2f} {r.n_pusbrf:>9.2f} {r.n_psspr:>9.2f}")

    if args.csv_dir:
        import os
        os.makedirs(args.csv_dir, exist_ok=True)
        with open(os.path.join(args.csv_dir, "table2.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write("h,r_min,r_max,hbdrw_over_pusbrf,pusbrf_over_psspr\n")
            for r in tables.table2:
                fh.write(f"{r.h},{r.r_min},{r.r_max},"
                         f"{r.hbdrw_over_pusbrf:.2f},{r.pusbrf_over_psspr:.2f}\n")
        with open(os.path.join(args.csv_dir, "table3.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write("h,r_min,r_max,distance_mc,distance_printed\n")
            for r in tables.table3:
                fh.write(f"{r.h},{r.r_min},{r.r_max},"
                         f"{r.distance_mc:.2f},{r.distance_printed:.2f}\n")
        with open(os.path.join(args.csv_dir, "table4.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write("h,r_min,r_max,n_hbdrw,n_pusbrf,n_psspr\n")
            for r in tables.table4:
                fh.write(f"{r.h},{r.r_min},{r.r_max},"
                         f"{r.n_hbdrw:.2f},{r.n_pusbrf:.2f},{r.n_psspr:.2f}\n")
    return 0


def cmd_analyze(args) -> int:
    r_min, r_max = (args.rmin, args.rmax)
    if r_min is None or r_max is None:
        r_min, r_max = analysis.rmin_rmax_for(args.h)
    params = analysis.AnalysisInput(r_min=r_min, r_max=r_max, h=args.h,
                                    H=args.H, r0_hops=args.r0,
                                    omega=args.omega)
    print(f"parameters: h={args.h} H={args.H} r_min={r_min} r_max={r_max} "
          f"r0={args.r0} omega={args.omega}")
    p_fail = analysis.failure_path_probability(args.r0, args.H, args.h)
    print(f"failure_path_probability = {p_fail:.4f}")
    print(f"ratio_hbdrw_over_pusbrf = {analysis.ratio_hbdrw_over_pusbrf(args.h):.2f} %")
    print(f"ratio_pusbrf_over_psspr = "
          f"{analysis.ratio_pusbrf_over_psspr(args.h, r_min, r_max):.2f} %")
    print(f"phantom_count_hbdrw  = {analysis.phantom_count_hbdrw(args.h):.2f}")
    print(f"phantom_count_pusbrf = {analysis.phantom_count_pusbrf(args.h):.2f}")
    print(f"phantom_count_psspr  = "
          f"{analysis.phantom_count_psspr(r_min, r_max, params.hx):.2f}")
    mc, se = analysis.psspr_distance_mc(r_min, r_max)
    print(f"avg_phantom_distance hbdrw/pusbrf = {r_min + params.hx:.2f} hops")
    print(f"avg_phantom_distance psspr = {mc:.2f} hops "
          f"(mc, se={se:.4f}; printed form gives "
          f"{analysis.psspr_distance_printed(r_min, r_max, args.H):.2f})")
    for proto in ("pusbrf", "hbdrw", "psspr"):
        print(f"comm_overhead {proto:<8} = "
              f"{analysis.comm_overhead(proto, params):.2f} hops")
    return 0


def cmd_trace(args) -> int:
    network = deploy(args.n_nodes, args.field_side, args.r, args.r0, args.seed)
    if args.network_out:
        network.dump_csv(args.network_out)
    source = pick_source(network, args.H, args.seed)
    sector = SectorParams(*analysis.rmin_rmax_for(args.h), omega=args.omega)
    walk = BaselineParams(walk_hops=args.h)
    router = make_router(network, args.protocol, source,
                         sector_params=sector, walk_params=walk)
    rng = np.random.default_rng([args.seed, args.H, args.h])
    trace = router(rng)
    print("packet_id,hop_index,node_id,phase")
    for row in trace.csv_rows(packet_id=0):
        print(row)
    status = "delivered" if trace.delivered else "undelivered"
    notes = f" annotations={';'.join(trace.annotations)}" if trace.annotations else ""
    print(f"# {status}, {trace.transmissions} transmissions, "
          f"source={source}, phantom={trace.phantom}{notes}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "tables":
            return cmd_tables(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        return cmd_trace(args)
    except (ParseError, ValidationError, InvalidParameter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (PhantomNetError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
