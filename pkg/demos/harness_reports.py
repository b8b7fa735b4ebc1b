"""
Running experiments and reading their reports
=============================================

Every experiment runs through the same harness: seeded replicas, aggregation,
theory values, and JSON/CSV/SVG files.  The same runs are available from the
command line, e.g.

    thickpoints hitting-prob --replicas 8 --param walks=500 --format json,csv,svg --out reports
"""

import json
import tempfile
from pathlib import Path

from thickpoints.harness import EXPERIMENTS, ExperimentConfig, run_experiment
from thickpoints.harness.cli import main

for name, exp in EXPERIMENTS.items():
    print(f"{name:24s} {exp.doc}")

out = Path(tempfile.mkdtemp(prefix="thickpoints-"))
cfg = ExperimentConfig("kac-lattice", master_seed=11, replicas=4, threads=2,
                       parameters={"R": "15", "walks": "300"}, output=str(out), formats=("json", "csv", "svg"))
report = run_experiment(cfg)
for row in report.aggregates:
    print(f"{row.metric:16s} {row.value:.4f} +- {row.stderr:.4f} over {row.n_replicas} replicas")
print("theory:", {m: round(v, 4) for _, m, v in report.theory})

data = json.loads((out / "kac-lattice.json").read_text())
print("JSON sections:", list(data))
print((out / "kac-lattice.csv").read_text())

# invalid parameters are refused before any work, with exit code 2
code = main(["pair-thick", "--param", "b=0.3", "--out", str(out / "never")])
print("exit code for b = 0.3:", code)
