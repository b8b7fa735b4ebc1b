"""Run a validated configuration end to end."""

from __future__ import annotations

import math
import os
import time
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, OutputError
from .experiments import EXPERIMENTS
from .replicate import replicate, resolve_threads
from .report import AggregateRow, Report, emit


def aggregate_records(records: list[dict]) -> list[AggregateRow]:
    """Mean, standard error and count per (sweep, metric) over successful replicas.

    Non-finite values (e.g. the log of a zero count) are left out of the mean
    and of the count.  Rows keep the order in which they first appear.
    """
    table: dict = {}
    for r in records:
        if r["status"] != "ok":
            continue
        for key, metric, value in r["rows"]:
            table.setdefault((key, metric), []).append(math.nan if value is None else float(value))
    out = []
    for (key, metric), vals in table.items():
        v = np.asarray(vals)
        v = v[np.isfinite(v)]
        n = len(v)
        mean = math.fsum(v.tolist()) / n if n else math.nan
        se = float(np.sqrt(np.sum((v - mean) ** 2) / (n - 1) / n)) if n > 1 else math.nan
        out.append(AggregateRow(key, metric, mean, se, n))
    return out


def _check_output(outdir: Path):
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {outdir}: {exc.strerror or exc}") from None
    if not (outdir.is_dir() and os.access(outdir, os.W_OK | os.X_OK)):
        raise OutputError(f"output directory {outdir} is not writable")


def run_experiment(config: ExperimentConfig, write: bool = True) -> Report:
    """Validate ``config``, run its replicas, aggregate and (optionally) write the requested files."""
    cfg = config.validated()
    exp = EXPERIMENTS[cfg.experiment]
    outdir = Path(cfg.output)
    if write:
        _check_output(outdir)
    params = cfg.parameters

    def task(seed, index):
        t0 = time.perf_counter()
        out = exp.task(params, seed)
        return out, time.perf_counter() - t0

    threads = resolve_threads(cfg.threads)
    t0 = time.perf_counter()
    results = replicate(task, cfg.replicas, cfg.master_seed, threads)
    records = [
        {
            "index": r.index,
            "seed": r.seed,
            "status": "ok" if r.ok else "failed",
            "error": r.error,
            "steps": int(r.value[0].steps) if r.ok else 0,
            "rows": list(r.value[0].rows) if r.ok else [],
        }
        for r in results
    ]
    aggregates = aggregate_records(records)
    ok_rows = [r["rows"] for r in records if r["status"] == "ok"]
    if exp.derive:
        aggregates += [AggregateRow(k, m, v, s, n, True) for k, m, v, s, n in exp.derive(params, ok_rows)]
    theory = list(exp.theory(params)) if exp.theory else []
    curves = []
    if exp.curves:
        agg = {(a.sweep, a.metric): (a.value, a.stderr, a.n_replicas) for a in aggregates}
        curves = [c for c in exp.curves(params, agg, theory) if any(math.isfinite(y) for y in c.y)]
    timing = {
        "wall_seconds": time.perf_counter() - t0,
        "threads": min(threads, cfg.replicas),
        "replica_seconds": [r.value[1] if r.ok else None for r in results],
    }
    report = Report(cfg, exp.sweep, records, aggregates, theory, curves, timing)
    if write:
        for fmt in cfg.formats:
            emit(report, fmt, outdir)
    return report
