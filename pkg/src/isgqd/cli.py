"""Command-line entry point: ``isgqd analyze|qd|nonfl|trace|groupoid <spec>``.

Exit codes: 0 when every requested check passes, 2 on soft failures (a schedule that
could not be met, a bound that was missed), 1 on errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _cap_threads() -> None:
    cap = os.environ.get("ISGQD_THREADS")
    if cap:
        for var in _THREAD_VARS:
            os.environ.setdefault(var, cap)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("spec", help="spec JSON file or the name of a bundled catalog entry")
    common.add_argument("--out", type=Path, help="directory for report files (default: JSON to stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9)

    p = argparse.ArgumentParser(prog="isgqd", description="Inverse semigroups, quasi-diagonal projections and traces.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="structure report")
    q = sub.add_parser("qd", parents=[common], help="quasi-diagonal projections for n = 1..n-max")
    q.add_argument("--n-max", type=int, default=4)
    q.add_argument("--strategy", default=None, help="full | berg | user:<file>")
    nf = sub.add_parser("nonfl", parents=[common], help="free group tower example")
    nf.add_argument("--n", type=int)
    nf.add_argument("--m", type=int)
    nf.add_argument("--r", type=int)
    nf.add_argument("--orientation", choices=["corrected", "literal"], default="corrected")
    t = sub.add_parser("trace", parents=[common], help="trace space, margins and faithfulness")
    t.add_argument("--margin", action="store_true", help="also tabulate margins for k = 1..K")
    sub.add_parser("groupoid", parents=[common], help="groupoid of germs as JSON")
    sub.add_parser("catalog", help="list bundled specs").set_defaults(spec=None)
    return p


def _emit(out: Path | None, files: dict[str, str]) -> None:
    if out is None:
        for name, text in files.items():
            if name.endswith(".json"):
                sys.stdout.write(text)
        return
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text)


def run(args: argparse.Namespace) -> int:
    from . import reports
    from .catalog import catalog_names, resolve
    from .qd import load_user_witness

    if args.command == "catalog":
        print("\n".join(catalog_names()))
        return 0
    spec = resolve(args.spec)
    cmd = args.command
    if cmd == "analyze":
        rep = reports.analyze_report(spec, args.seed, args.tol)
        _emit(args.out, {"analysis.json": reports.dumps(rep)})
        return 2 if rep.get("consistency", {}).get("conflict") else 0
    if cmd == "qd":
        strategy, user = args.strategy, None
        if strategy and strategy.startswith("user:"):
            user = load_user_witness(strategy[5:])
            strategy = "user"
        rep, table = reports.qd_reports(spec, args.n_max, strategy, user, args.seed)
        _emit(args.out, {"qd_report.json": reports.dumps(rep), "qd.csv": table})
        print(f"verdict: {rep['verdict']}", file=sys.stderr)
        return 0 if rep["verdict"] == "pass" else 2
    if cmd == "nonfl":
        rep, table = reports.nonfl_report(spec, args.n, args.m, args.r, args.orientation, args.seed)
        _emit(args.out, {"nonfl_report.json": reports.dumps(rep), "nonfl.csv": table})
        print(f"verdict: {rep['verdict']}", file=sys.stderr)
        return 0 if rep["verdict"] == "pass" else 2
    if cmd == "trace":
        rep = reports.trace_report(spec, args.margin, args.seed, args.tol)
        _emit(args.out, {"trace_report.json": reports.dumps(rep)})
        return 0
    rep = reports.groupoid_report(spec, args.seed)
    _emit(args.out, {"groupoid.json": reports.dumps(rep)})
    return 0


def main(argv: list[str] | None = None) -> int:
    _cap_threads()
    args = build_parser().parse_args(argv)
    from .errors import IsgqdError, ScheduleUnachievable

    try:
        return run(args)
    except ScheduleUnachievable as exc:
        print(f"soft failure: {exc}", file=sys.stderr)
        return 2
    except IsgqdError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
