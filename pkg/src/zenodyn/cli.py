"""``zeno``: configuration-driven experiment runner.

Commands
--------
``zeno run <config.yaml>``
    Execute one experiment; write the CSV time series and JSON summary.
``zeno preset <name>``
    Build a pinned reference dataset (fig1, fig6, fig7, qubit_protection).
``zeno sweep <config.yaml>``
    Re-run the experiment over the config's parameter grid; emit one CSV
    row of derived scalars per grid value.
``zeno subspaces <config.yaml>``
    Print the invariant-subspace split the configured procedure induces.

Common flags: ``--set dotted.path=value`` overrides config entries
(repeatable); ``--out DIR`` redirects outputs, defaulting to the
``ZENO_OUT_DIR`` environment variable, then the working directory.

Exit codes: 0 success; 1 sweep completed with failed rows; 2 usage or
configuration error; 3 data-integrity or numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import __version__
from .config import load_config
from .errors import PreconditionError, StructuralError, UsageError, ZenodynError
from .presets import PRESET_NAMES, build_preset
from .runner import describe_subspaces, run_experiment, run_sweep

__all__ = ["main"]

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_USAGE = 2
EXIT_DATA = 3

_USAGE_ERRORS = (UsageError, StructuralError, PreconditionError)

OUT_DIR_VAR = "ZENO_OUT_DIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zeno",
        description="Quantum Zeno dynamics experiment runner.",
    )
    parser.add_argument("--version", action="version", version=f"zenodyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config: bool) -> None:
        if config:
            p.add_argument("config", help="experiment config file (YAML)")
            p.add_argument(
                "--set",
                dest="overrides",
                action="append",
                default=[],
                metavar="PATH=VALUE",
                help="override a config entry, e.g. --set model.params.omega=2",
            )
        p.add_argument(
            "--out",
            default=None,
            metavar="DIR",
            help=f"output directory (default: ${OUT_DIR_VAR}, then the working directory)",
        )

    add_common(sub.add_parser("run", help="execute one experiment"), config=True)
    preset = sub.add_parser("preset", help="build a pinned reference dataset")
    preset.add_argument("name", help=f"one of {', '.join(PRESET_NAMES)}")
    add_common(preset, config=False)
    add_common(sub.add_parser("sweep", help="run a parameter sweep"), config=True)
    subspaces = sub.add_parser(
        "subspaces", help="print the induced invariant-subspace split"
    )
    subspaces.add_argument("config", help="experiment config file (YAML)")
    subspaces.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="PATH=VALUE"
    )
    return parser


def _out_dir(flag: str | None) -> Path:
    return Path(flag or os.environ.get(OUT_DIR_VAR) or ".")


def _resolve(path_text: str, out_dir: Path) -> Path:
    path = Path(path_text)
    if not path.is_absolute():
        path = out_dir / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_summary(summary: dict[str, Any], path: Path) -> None:
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _report(summary: dict[str, Any], csv_path: Path, summary_path: Path) -> None:
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    for key in sorted(summary.get("derived", {})):
        print(f"  {key} = {summary['derived'][key]:.12g}")
    for warning in summary.get("warnings", []):
        print(f"  warning [{warning['operation']}]: {warning['message']}", file=sys.stderr)


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config, args.overrides)
    result = run_experiment(config)
    out_dir = _out_dir(args.out)
    csv_path = _resolve(config.csv_path, out_dir)
    summary_path = _resolve(config.summary_path, out_dir)
    result.series.write_csv(csv_path)
    result.summary["outputs"] = {"csv": str(csv_path), "summary": str(summary_path)}
    _write_summary(result.summary, summary_path)
    _report(result.summary, csv_path, summary_path)
    return EXIT_OK


def _cmd_preset(args: argparse.Namespace) -> int:
    result = build_preset(args.name)
    out_dir = _out_dir(args.out)
    csv_path = _resolve(f"{args.name}.csv", out_dir)
    summary_path = _resolve(f"{args.name}.summary.json", out_dir)
    result.series.write_csv(csv_path)
    result.summary["outputs"] = {"csv": str(csv_path), "summary": str(summary_path)}
    _write_summary(result.summary, summary_path)
    _report(result.summary, csv_path, summary_path)
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config, args.overrides)
    lines, rows, summary = run_sweep(config)
    out_dir = _out_dir(args.out)
    csv_path = _resolve(config.csv_path, out_dir)
    summary_path = _resolve(config.summary_path, out_dir)
    csv_path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    summary["outputs"] = {"csv": str(csv_path), "summary": str(summary_path)}
    _write_summary(summary, summary_path)
    failed = summary["failed"]
    print(f"wrote {csv_path}")
    print(f"wrote {summary_path}")
    print(f"  {len(rows)} rows, {failed} failed")
    for row in rows:
        if row["status"] != "ok":
            print(f"  row {row['index']} (value {row['value']}): {row['error']}",
                  file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def _cmd_subspaces(args: argparse.Namespace) -> int:
    config = load_config(args.config, args.overrides)
    sys.stdout.write(describe_subspaces(config))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    handlers = {
        "run": _cmd_run,
        "preset": _cmd_preset,
        "sweep": _cmd_sweep,
        "subspaces": _cmd_subspaces,
    }
    try:
        return handlers[args.command](args)
    except _USAGE_ERRORS as exc:
        print(f"zeno: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZenodynError as exc:
        print(f"zeno: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
