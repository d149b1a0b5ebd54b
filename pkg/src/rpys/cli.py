"""Command-line entry points.

``rpys run-script`` replays an analysis script, ``rpys analyze`` runs
the one-shot import/cluster/merge/remove/export pipeline, and
``rpys serve`` starts the local explorer service.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .clustering import ClusterConfig
from .exports import export_csv_cr, export_csv_graph, save_cre
from .model import EmptyDatasetError, build_dataset, compute_stats
from .session import Session
from .scripting import (
    ScriptExecutionError,
    ScriptSemanticError,
    ScriptSyntaxError,
    ExecutionReport,
    execute,
    parse_script,
)
from .spectroscopy import spectrogram
from .wos import WosFormatError, parse_wos_file

BIND_ENV_VAR = "RPYS_BIND_ADDRESS"


def _print_report(report: ExecutionReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.as_dict(), indent=2))
        return
    print(f"{'#':>2}  {'command':<12} {'seconds':>8}  {'refs':>7}  {'non-distinct':>12}  notes")
    for step in report.steps:
        refs = step.stats.n_distinct_crs if step.stats else "-"
        total = step.stats.total_nondistinct_crs if step.stats else "-"
        notes = "; ".join(step.notes + [f"wrote {p}" for p in step.outputs])
        print(
            f"{step.index:>2}  {step.command:<12} {step.elapsed_s:>8.3f}  "
            f"{refs:>7}  {total:>12}  {notes}"
        )


def _parse_bindings(pairs: list[str]) -> dict[str, str]:
    bind = {}
    for pair in pairs:
        if "=" not in pair:
            raise SystemExit(f"--bind expects NAME=PATH, got {pair!r}")
        name, path = pair.split("=", 1)
        bind[name] = path
    return bind


def cmd_run_script(args: argparse.Namespace) -> int:
    script_path = Path(args.script)
    try:
        text = sys.stdin.read() if args.script == "-" else script_path.read_text("utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        commands = parse_script(text)
    except (ScriptSyntaxError, ScriptSemanticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        report = execute(commands, args.workdir, _parse_bindings(args.bind))
    except ScriptExecutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return min(exc.index + 1, 255)
    _print_report(report, args.json)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    records = []
    for name in args.inputs:
        path = Path(name)
        if not path.is_file():
            print(f"error: input file not found: {name}", file=sys.stderr)
            return 1
        try:
            result = parse_wos_file(path.read_bytes(), source_name=path.name)
        except WosFormatError as exc:
            print(f"error: {name}: {exc}", file=sys.stderr)
            return 1
        for diag in result.diagnostics:
            print(f"note: {name}: {diag}", file=sys.stderr)
        records.extend(result.records)

    try:
        dataset = build_dataset(records)
    except EmptyDatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    session = Session(dataset)
    config = ClusterConfig(
        threshold=args.cluster_threshold,
        use_volume=args.volume,
        use_page=args.page,
        use_doi=args.doi,
    )
    n_clusters = session.cluster(config)
    session.merge()
    if args.min_ncr >= 1:
        session.remove_ncr(0, args.min_ncr - 1)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.inputs[0]).stem
    ds = session.dataset
    try:
        stats = compute_stats(ds)
    except EmptyDatasetError:
        print("error: no references left after removal; lower --min-ncr", file=sys.stderr)
        return 1
    export_csv_cr(ds, out_dir / f"{stem}_CR.csv")
    export_csv_graph(ds, out_dir / f"{stem}_GRAPH.csv")
    save_cre(ds, out_dir / f"{stem}.cre")

    print(f"clusters: {n_clusters}")
    for key, value in stats.as_dict().items():
        print(f"{key}: {value}")
    peaks = [row.rpy for row in spectrogram(ds) if row.is_peak]
    print(f"peak years: {', '.join(map(str, peaks)) if peaks else 'none'}")
    print(f"outputs: {out_dir / (stem + '_CR.csv')}, {out_dir / (stem + '_GRAPH.csv')}, "
          f"{out_dir / (stem + '.cre')}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    host = os.environ.get(BIND_ENV_VAR, "127.0.0.1")
    app = create_app(workdir=args.workdir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rpys", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run-script", help="replay an analysis script")
    p_run.add_argument("script", help="script file, or - for stdin")
    p_run.add_argument("--workdir", default=".", help="directory for inputs and outputs")
    p_run.add_argument(
        "--bind",
        action="append",
        default=[],
        metavar="NAME=PATH",
        help="remap an input file name mentioned in the script (repeatable)",
    )
    p_run.add_argument("--json", action="store_true", help="machine-readable report")
    p_run.set_defaults(func=cmd_run_script)

    p_an = sub.add_parser("analyze", help="one-shot import/cluster/merge/remove/export")
    p_an.add_argument("inputs", nargs="+", help="WoS plain-text export files")
    p_an.add_argument("--cluster-threshold", type=float, default=0.75)
    p_an.add_argument("--volume", action=argparse.BooleanOptionalAction, default=True,
                      help="volume numbers must not conflict when linking variants")
    p_an.add_argument("--page", action=argparse.BooleanOptionalAction, default=True,
                      help="page numbers must not conflict when linking variants")
    p_an.add_argument("--doi", action=argparse.BooleanOptionalAction, default=False,
                      help="a shared DOI links two references directly")
    p_an.add_argument("--min-ncr", type=int, default=1, metavar="N",
                      help="drop references cited fewer than N times (removes [0, N-1])")
    p_an.add_argument("--out-dir", default=".", help="directory for exports")
    p_an.set_defaults(func=cmd_analyze)

    p_serve = sub.add_parser("serve", help="start the explorer HTTP service")
    p_serve.add_argument("--port", type=int, default=8600)
    p_serve.add_argument("--workdir", default=".",
                         help="directory for JSON-mode session file references")
    p_serve.add_argument("--ui-dir", default=None,
                         help="serve a built explorer UI from this directory")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
