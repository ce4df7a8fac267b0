"""Command line entry point.

    crowdsim evac run  --config FILE [--trace DIR] [--output CSV]
    crowdsim stage run --config FILE [--trace DIR] [--output CSV]
    crowdsim sweep     --config FILE [--output CSV]
    crowdsim validate  --config FILE

The report goes to ``--output``, else the config's ``output`` (parent
directories are created), else stdout.
Exit status: 0 success, 1 configuration error, 2 runtime error (including
a sweep in which any run failed; the report is still written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, parse_config, serialize_config
from .experiment import run_experiment
from .report import render_report, write_report

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="crowdsim", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for mode in ("evac", "stage"):
        mp = sub.add_parser(mode, help=f"{mode} experiments")
        msub = mp.add_subparsers(dest="action", required=True)
        run = msub.add_parser("run", help=f"run an {mode} config")
        run.add_argument("--config", required=True)
        run.add_argument("--trace", help="directory for per-run JSONL traces")
        run.add_argument("--output", help="report CSV path")
    sw = sub.add_parser("sweep", help="run any config as a sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--output", help="report CSV path")
    va = sub.add_parser("validate", help="check a config and print it with defaults filled")
    va.add_argument("--config", required=True)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.command in ("evac", "stage") and cfg.mode != args.command:
            raise ConfigError("mode", f"config is for {cfg.mode!r}, not {args.command!r}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "validate":
        sys.stdout.write(serialize_config(cfg))
        return EXIT_OK

    if getattr(args, "trace", None):
        cfg.trace = args.trace
    output = getattr(args, "output", None) or cfg.output
    try:
        rows = run_experiment(cfg)
        if output:
            Path(output).parent.mkdir(parents=True, exist_ok=True)
            write_report(rows, output)
        else:
            sys.stdout.write(render_report(rows))
    except Exception as e:
        print(f"runtime error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME

    failed = [r for r in rows if not r["aggregate"] and r["error"]]
    for r in failed:
        print(f"run failed: point {r['point']} seed {r['seed']}: {r['error']}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
