"""Command line runner: ``metallic run`` and ``metallic list``.

Exit status of ``run``: 0 when every check passes, 1 when any fails, 2 when a
manifest or the configuration cannot be used.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import builtin, connections
from .errors import DegenerateMetric, DomainError, ExpressionSyntaxError, SchemaError
from .manifold import (DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL, ChartManifold, load_manifest,
                       metrics_on, sample_points)
from .suites import SUITE_NAMES, SuiteContext, SuiteResult, resolve_suites, run_suites

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    inputs: list = field(default_factory=list)
    suites: list = field(default_factory=lambda: ["all"])
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOL
    format: str = "text"
    out: str | None = None
    timing: bool = True

    def validate(self):
        if not self.inputs:
            raise ConfigError("no input given; use --input or --example")
        if self.samples < 1:
            raise ConfigError("--samples must be at least 1")
        if not self.tolerance > 0:
            raise ConfigError("--tol must be positive")
        if self.format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        try:
            resolve_suites(self.suites)
        except ValueError as err:
            raise ConfigError(str(err)) from err


def load_input(source: str) -> ChartManifold:
    """A manifest path, or a built-in example id when no such file exists."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return load_manifest(fh.read())
    if source in builtin.MANIFESTS:
        return builtin.load_example(source)
    raise FileNotFoundError(f"no manifest file or example named {source!r}")


LOAD_ERRORS = (OSError, SchemaError, ExpressionSyntaxError, DegenerateMetric, DomainError,
               ValueError, KeyError)


def execute(config: RunConfig) -> tuple[int, SuiteResult]:
    """Run every suite on every input. Raises the load errors above."""
    config.validate()
    charts = [load_input(source) for source in config.inputs]
    for M in charts:
        # a degenerate metric at the sampled points is a manifest problem
        metrics_on(M, sample_points(M.domain, config.samples, config.seed).points)
    ctx = SuiteContext(config.samples, config.seed, config.tolerance)
    result = SuiteResult()
    for M in charts:
        result.extend(run_suites(M, config.suites, ctx))
    result.reports.sort(key=lambda t: (t.report.check_id, t.report.manifold_id))
    status = EXIT_OK if all(t.report.passed for t in result.reports) else EXIT_FAIL
    return status, result


def render(result: SuiteResult, fmt: str, timing: bool = True) -> str:
    if fmt == "json":
        return json.dumps([t.to_dict(timing) for t in result.reports], indent=2) + "\n"
    return "".join(t.report.line() + "\n" for t in result.reports)


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        status, result = execute(config)
    except ConfigError as err:
        print(f"error: {err}", file=stderr)
        return EXIT_ERROR
    except LOAD_ERRORS as err:
        print(f"error: {type(err).__name__}: {err}", file=stderr)
        return EXIT_ERROR
    text = render(result, config.format, config.timing)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    for check_id, manifold_id, reason in result.skipped:
        print(f"SKIP {check_id} {manifold_id} ({reason})", file=stderr)
    failed = sum(not t.report.passed for t in result.reports)
    print(f"{len(result.reports) - failed}/{len(result.reports)} checks passed", file=stderr)
    return status


def list_examples(fmt: str = "text") -> str:
    rows = []
    for eid in builtin.example_ids():
        flags = connections.classify(builtin.load_example(eid)).flags()
        rows.append({"id": eid, "description": builtin.DESCRIPTIONS[eid], "flags": flags})
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    lines = []
    for row in rows:
        flags = " ".join(f"{k}={'yes' if v else 'no'}" for k, v in row["flags"].items())
        lines.append(f"{row['id']}  {row['description']}\n    {flags}\n")
    return "".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metallic",
                                     description="Verify metallic structures on coordinate charts.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run check suites on manifests or built-in examples")
    run_p.add_argument("--input", action="append", default=[],
                       help="manifest path or example id (repeatable)")
    run_p.add_argument("--example", action="append", default=[],
                       help="built-in example id, or 'all' (repeatable)")
    run_p.add_argument("--suite", action="append", default=[],
                       help=f"one of {', '.join(SUITE_NAMES)}, all (repeatable; default all)")
    run_p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    run_p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    run_p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    run_p.add_argument("--format", choices=("text", "json"), default="text")
    run_p.add_argument("--out", help="write the report here instead of stdout")
    run_p.add_argument("--no-timing", action="store_true",
                       help="leave wall_time out of JSON reports so reruns are byte-identical")

    list_p = sub.add_parser("list", help="list built-in examples with classification flags")
    list_p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def config_from_args(args) -> RunConfig:
    inputs = list(args.input)
    for eid in args.example:
        inputs.extend(builtin.example_ids() if eid == "all" else [eid])
    return RunConfig(inputs=inputs, suites=args.suite or ["all"], samples=args.samples,
                     seed=args.seed, tolerance=args.tol, format=args.format, out=args.out,
                     timing=not args.no_timing)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage, which matches the config-error status
        return int(exc.code or 0)
    if args.command == "list":
        sys.stdout.write(list_examples(args.format))
        return EXIT_OK
    for eid in args.example:
        if eid != "all" and eid not in builtin.MANIFESTS:
            print(f"error: unknown example {eid!r}; choose from {builtin.example_ids()}",
                  file=sys.stderr)
            return EXIT_ERROR
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
