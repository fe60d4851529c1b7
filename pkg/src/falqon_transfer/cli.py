"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad graph data, failed run, missing
cells), 2 usage error (bad or missing flags).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from . import __version__
from .experiment import MissingCellsError, RunManifest, load_grid, run_sweep, write_findings
from .falqon import FalqonConfig, read_trace_csv, replay_schedule, run_falqon, write_trace_csv
from .graph import Family, generate, max_cut_brute_force, read_graph, write_graph
from .transfer import GraphSpec, TransferSpec, run_transfer, save_transfer

DEFAULTS = FalqonConfig()


def _add_falqon_flags(p: argparse.ArgumentParser, layers: bool = True) -> None:
    p.add_argument("--dt", type=float, default=DEFAULTS.dt, help="time step shared by cost and mixer layers")
    if layers:
        p.add_argument("--layers", type=int, default=DEFAULTS.layers, help="number of layers L")
        p.add_argument("--beta-init", type=float, default=DEFAULTS.beta_init, help="gain of the first layer")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(prog="falqon-transfer", description=__doc__, formatter_class=fmt)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="sample a random graph to an edge-list file", formatter_class=fmt)
    p.add_argument("--family", required=True, choices=["er", "3reg"], help="graph ensemble")
    p.add_argument("--n", type=int, required=True, help="vertex count")
    p.add_argument("--p", type=float, default=None, help="edge probability (er only)")
    p.add_argument("--seed", type=int, required=True, help="64-bit generator seed")
    p.add_argument("--out", type=Path, required=True, help="output edge-list path")

    p = sub.add_parser("maxcut", help="exact Max-Cut by brute force", formatter_class=fmt)
    p.add_argument("graph", type=Path, help="edge-list file")

    p = sub.add_parser("falqon", help="closed-loop FALQON run to a trace CSV", formatter_class=fmt)
    p.add_argument("graph", type=Path, help="edge-list file")
    _add_falqon_flags(p)
    p.add_argument("--out", type=Path, required=True, help="trace CSV path")

    p = sub.add_parser("replay", help="open-loop replay of a gain schedule", formatter_class=fmt)
    p.add_argument("graph", type=Path, help="edge-list file")
    p.add_argument("--betas", type=Path, required=True, help="trace CSV whose beta column is replayed")
    _add_falqon_flags(p, layers=False)
    p.add_argument("--out", type=Path, required=True, help="trace CSV path")

    p = sub.add_parser("transfer", help="donor -> recipient transfer experiment", formatter_class=fmt)
    p.add_argument("--spec", type=Path, default=None, help="YAML/JSON transfer spec; replaces the flags below")
    p.add_argument("--donor-family", choices=["er", "3reg"], default=None, help="donor ensemble")
    p.add_argument("--donor-n", type=int, default=8, help="donor vertex count")
    p.add_argument("--donor-p", type=float, default=None, help="donor edge probability (er only)")
    p.add_argument("--donor-seed", type=int, default=None, help="donor graph seed (required without --spec)")
    p.add_argument("--recipient-family", choices=["er", "3reg"], default=None, help="recipient ensemble")
    p.add_argument("--recipient-n", type=int, default=14, help="recipient vertex count")
    p.add_argument("--recipient-p", type=float, default=None, help="recipient edge probability (er only)")
    p.add_argument("--recipients", type=int, default=10, help="number of recipient graphs")
    p.add_argument(
        "--recipient-seed", type=int, default=None, help="seed of recipient 0; recipient k uses seed+k (required without --spec)"
    )
    _add_falqon_flags(p)
    p.add_argument("--workers", type=int, default=1, help="threads for recipient replays")
    p.add_argument("--out-dir", type=Path, required=True, help="directory for result.json and trace CSVs")

    p = sub.add_parser("sweep", help="run a sweep grid", formatter_class=fmt)
    p.add_argument("config", type=Path, help="YAML sweep config (SweepGrid fields)")
    p.add_argument("--out-dir", type=Path, required=True, help="sweep output directory")
    p.add_argument("--workers", type=int, default=1, help="concurrent cells")
    p.add_argument("--force", action="store_true", help="rerun cells that already have results")

    p = sub.add_parser("report", help="findings tables from a finished sweep", formatter_class=fmt)
    p.add_argument("out_dir", type=Path, help="sweep output directory")
    return parser


def _cfg(args) -> FalqonConfig:
    return FalqonConfig(dt=args.dt, layers=args.layers, beta_init=args.beta_init)


def _cmd_gen_graph(args, parser) -> int:
    if args.family == "3reg":
        if args.n < 4 or args.n % 2:
            parser.error(f"--family 3reg needs an even --n >= 4, got {args.n}")
        if args.p is not None:
            parser.error("--p applies to --family er only")
    elif args.p is None:
        parser.error("--family er requires --p")
    g = generate(args.family, args.n, args.p, args.seed)
    write_graph(g, args.out)
    print(f"wrote {args.out} (n={g.n}, m={g.m})")
    return 0


def _cmd_maxcut(args, parser) -> int:
    sol = max_cut_brute_force(read_graph(args.graph))
    print(f"optimum={sol.optimum} witness={sol.witness}")
    return 0


def _cmd_falqon(args, parser) -> int:
    trace = run_falqon(read_graph(args.graph), _cfg(args))
    write_trace_csv(trace, args.out)
    print(f"optimum={trace.optimum} final_ratio={trace.final_ratio:.12g}")
    return 0


def _cmd_replay(args, parser) -> int:
    betas = read_trace_csv(args.betas)["beta"]
    cfg = FalqonConfig(dt=args.dt, layers=len(betas))
    trace = replay_schedule(read_graph(args.graph), betas, cfg)
    write_trace_csv(trace, args.out)
    print(f"optimum={trace.optimum} final_ratio={trace.final_ratio:.12g}")
    return 0


def _cmd_transfer(args, parser) -> int:
    if args.spec is not None:
        spec = TransferSpec.from_dict(yaml.safe_load(args.spec.read_text()))
    else:
        missing = [
            flag
            for flag, val in (
                ("--donor-family", args.donor_family),
                ("--donor-seed", args.donor_seed),
                ("--recipient-family", args.recipient_family),
                ("--recipient-seed", args.recipient_seed),
            )
            if val is None
        ]
        if missing:
            parser.error("without --spec these flags are required: " + ", ".join(missing))
        spec = TransferSpec(
            donor=GraphSpec(Family.parse(args.donor_family), args.donor_n, args.donor_p),
            donor_seed=args.donor_seed,
            recipient=GraphSpec(Family.parse(args.recipient_family), args.recipient_n, args.recipient_p),
            recipient_seed_base=args.recipient_seed,
            recipients_count=args.recipients,
            cfg=_cfg(args),
        )
    result = run_transfer(spec, workers=args.workers)
    save_transfer(result, args.out_dir)
    print(
        f"donor_final_ratio={result.donor_final_ratio:.12g} "
        f"final_mean={result.final_mean:.12g} final_std={result.final_std:.12g}"
    )
    return 0


def _cmd_sweep(args, parser) -> int:
    manifest = run_sweep(load_grid(args.config), args.out_dir, workers=args.workers, force=args.force)
    print(
        f"cells={len(manifest.cells)} executed={len(manifest.executed)} failed={len(manifest.failed)}"
    )
    return 1 if manifest.failed else 0


def _cmd_report(args, parser) -> int:
    findings = write_findings(RunManifest.load(args.out_dir))
    sys.stdout.write(findings.to_text())
    return 0


COMMANDS = {
    "gen-graph": _cmd_gen_graph,
    "maxcut": _cmd_maxcut,
    "falqon": _cmd_falqon,
    "replay": _cmd_replay,
    "transfer": _cmd_transfer,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args, parser)
    except MissingCellsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError, yaml.YAMLError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
