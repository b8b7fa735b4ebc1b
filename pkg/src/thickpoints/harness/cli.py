"""Command-line entry point: ``thickpoints <experiment> [options]``."""

from __future__ import annotations

import argparse
import os
import sys

from ..errors import ThickpointsError
from .config import ConfigError, ExperimentConfig, OutputError, UnknownExperimentError, load_config
from .experiments import EXPERIMENTS
from .replicate import AllReplicasFailed
from .runner import run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    listing = "\n".join(f"  {name:24s}{e.doc}" for name, e in EXPERIMENTS.items())
    p = _Parser(
        prog="thickpoints",
        description="Run a thick-point experiment and write CSV/JSON/SVG reports.",
        epilog="experiments:\n" + listing,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("experiment", help="registered experiment name")
    p.add_argument("--config", metavar="FILE", help="flat key = value file; flags override it")
    p.add_argument("--seed", metavar="U64", help="master seed")
    p.add_argument("--replicas", metavar="N", help="number of replicas")
    p.add_argument("--threads", metavar="N|auto", help="worker threads (default: $THICKPOINTS_THREADS or 1)")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--format", metavar="LIST", help="comma list from csv,json,svg")
    p.add_argument("--param", metavar="key=value", action="append", default=[], help="experiment parameter (repeatable)")
    return p


def config_from_args(argv) -> ExperimentConfig:
    args = build_parser().parse_args(argv)
    kw = load_config(args.config) if args.config else {"parameters": {}}
    file_name = kw.pop("experiment", None)
    if file_name is not None and file_name != args.experiment:
        raise ConfigError(f"config file names experiment {file_name!r} but {args.experiment!r} was requested")
    if args.seed is not None:
        kw["master_seed"] = args.seed
    if args.replicas is not None:
        kw["replicas"] = args.replicas
    if args.threads is not None:
        kw["threads"] = args.threads
    elif "threads" not in kw:
        kw["threads"] = os.environ.get("THICKPOINTS_THREADS", "1")
    if args.out is not None:
        kw["output"] = args.out
    if args.format is not None:
        kw["formats"] = tuple(args.format.split(","))
    for item in args.param:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        kw["parameters"][k.strip()] = v
    if args.experiment in EXPERIMENTS and "replicas" not in kw:
        kw["replicas"] = EXPERIMENTS[args.experiment].default_replicas
    for key in ("master_seed", "replicas"):
        if isinstance(kw.get(key), str):
            try:
                kw[key] = int(kw[key], 0)
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {kw[key]!r}") from None
    return ExperimentConfig(experiment=args.experiment, **kw)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = config_from_args(argv)
        report = run_experiment(cfg)
    except UnknownExperimentError as exc:
        print(f"thickpoints: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"thickpoints: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"thickpoints: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AllReplicasFailed, ThickpointsError, MemoryError, RuntimeError, ValueError) as exc:
        print(f"thickpoints: runtime-error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    failed = sum(r["status"] != "ok" for r in report.records)
    print(
        f"{report.config.experiment}: {len(report.records) - failed}/{len(report.records)} replicas ok, "
        f"{report.steps} steps, {report.timing['wall_seconds']:.2f} s -> {report.config.output}"
    )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
