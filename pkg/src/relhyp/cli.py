"""Command-line entry point: ``relhyp <subcommand> --config run.yaml``.

Exit codes: 0 pass, 1 invariant failure, 2 config error, 3 budget error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import pipeline
from .config import ConfigError, load_config
from .groups import BudgetError, GroupSpecError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

SUBCOMMANDS = {
    "build": "build the cusped ball(s); write graph dumps and horoball registries",
    "delta": "estimate delta-hat and check the triangle overlap bound",
    "shadows": "build the domain atlas and summarise its shadows",
    "rings": "ring lemma and ring-structure equivalence suites",
    "horoball-rings": "shadow-of-horoball covering suite",
    "distortion": "forward pipeline: QI -> boundary map -> ring distortion",
    "phif": "reconstruction pipeline: boundary map -> E-sets -> Phi f",
    "roundtrip": "forward then reconstruction, plus truncation and base-point stability",
    "report": "merge JSON reports",
    "svg": "draw the domain boundary atlas with a few shadows",
}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relhyp", description="Desk-scale geometry of relatively hyperbolic groups.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=help_)
        if name == "report":
            sp.add_argument("inputs", nargs="+", help="report JSON files")
        else:
            sp.add_argument("--config", required=True, help="run config (YAML)")
            sp.add_argument("--seed", type=int, help="override the master seed")
        sp.add_argument("--out", help="output file (or directory for build); default stdout")
    return p


def _write(out: str | None, text: str):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)


def run(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "report":
            reports = [json.loads(Path(f).read_text()) for f in args.inputs]
            merged = pipeline.run_report(reports)
            _write(args.out, pipeline.dumps(merged))
            return EXIT_OK if merged["passed"] else EXIT_FAIL
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.raw["seed"] = args.seed
        ctx = pipeline.Context(cfg)
        if args.command == "build":
            report, files = pipeline.run_build(ctx)
            outdir = Path(args.out or ".")
            outdir.mkdir(parents=True, exist_ok=True)
            for name, text in files.items():
                (outdir / name).write_text(text)
            (outdir / "build.json").write_text(pipeline.dumps(report))
            code = EXIT_OK
        elif args.command == "svg":
            _write(args.out, pipeline.run_svg(ctx))
            code = EXIT_OK
        else:
            fn = getattr(pipeline, "run_" + args.command.replace("-", "_"))
            report = fn(ctx)
            _write(args.out, pipeline.dumps(report))
            for k, v in report["checks"].items():
                if not v:
                    print(f"check failed: {k}", file=sys.stderr)
            code = EXIT_OK if report["passed"] else EXIT_FAIL
    except (ConfigError, GroupSpecError, pipeline.RadiusError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    print(f"{args.command}: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
