"""The in-memory report and its JSON, CSV and SVG views.

JSON is canonical.  CSV and SVG are derived from the same :class:`Report`.
Timing lives in its own ``timing`` section so that everything else is a pure
function of the configuration.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .config import ExperimentConfig, OutputError

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AggregateRow:
    sweep: tuple
    metric: str
    value: float
    stderr: float
    n_replicas: int
    derived: bool = False


@dataclass
class Report:
    config: ExperimentConfig
    sweep_names: tuple
    records: list  # dicts: index, seed, status, error, steps, rows
    aggregates: list
    theory: list  # (sweep, metric, value)
    curves: list  # Curve
    timing: dict = field(default_factory=dict)

    @property
    def steps(self) -> int:
        return int(sum(r["steps"] for r in self.records))

    def aggregate(self, metric: str, **sweep) -> AggregateRow:
        """The aggregate row for ``metric`` whose sweep columns match ``sweep`` (others None)."""
        key = tuple(sweep.get(n) for n in self.sweep_names)
        for row in self.aggregates:
            if row.metric == metric and row.sweep == key:
                return row
        raise KeyError((metric, sweep))

    def theory_value(self, metric: str, **sweep) -> float:
        key = tuple(sweep.get(n) for n in self.sweep_names)
        for s, m, v in self.theory:
            if m == metric and s == key:
                return v
        raise KeyError((metric, sweep))

    # ------------------------------------------------------------------
    def to_dict(self, include_timing: bool = True) -> dict:
        names = self.sweep_names

        def sw(key):
            return {n: _num(v) for n, v in zip(names, key)}

        d = {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.echo(),
            "sweep": list(names),
            "accounting": {"steps": self.steps, "replicas_ok": sum(r["status"] == "ok" for r in self.records)},
            "records": [
                {
                    "index": r["index"],
                    "seed": r["seed"],
                    "status": r["status"],
                    "error": r["error"],
                    "steps": r["steps"],
                    "rows": [{"sweep": sw(k), "metric": m, "value": _num(v)} for k, m, v in r["rows"]],
                }
                for r in self.records
            ],
            "aggregates": [
                {
                    "sweep": sw(a.sweep),
                    "metric": a.metric,
                    "value": _num(a.value),
                    "stderr": _num(a.stderr),
                    "n_replicas": a.n_replicas,
                    "derived": a.derived,
                }
                for a in self.aggregates
            ],
            "theory": [{"sweep": sw(k), "metric": m, "value": _num(v)} for k, m, v in self.theory],
            "curves": [c.as_dict() for c in self.curves],
        }
        if include_timing:
            d["timing"] = self.timing
        return d

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(_clean(self.to_dict(include_timing)), indent=1, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*self.sweep_names, "metric", "value", "stderr", "n_replicas"])
        for a in self.aggregates:
            w.writerow([*(_cell(v) for v in a.sweep), a.metric, _cell(a.value), _cell(a.stderr), a.n_replicas])
        return buf.getvalue()

    def to_svg(self) -> str:
        return render_svg(self.curves, title=self.config.experiment)


def _num(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if v is None:
        return None
    return float(v)


def _clean(obj):
    """Non-finite floats become null so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def parse_csv(text: str) -> tuple[list[str], list[tuple]]:
    """Inverse of :meth:`Report.to_csv`: header and rows ``(sweep, metric, value, stderr, n)``."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    k = len(header) - 4
    out = []
    for r in body:
        sweep = tuple(None if c == "" else float(c) for c in r[:k])
        out.append((sweep, r[k], float(r[k + 1]), float(r[k + 2]), int(r[k + 3])))
    return header, out


# ---------------------------------------------------------------------------
# SVG


PANEL_W, PANEL_H, PAD = 520, 300, 56


def render_svg(curves, title: str = "") -> str:
    """One panel per curve: data as a solid path with point markers, theory dashed."""
    n = max(1, len(curves))
    H = n * PANEL_H + 30
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{H}" viewBox="0 0 {PANEL_W} {H}" font-family="sans-serif" font-size="11">',
        f'<text x="{PANEL_W / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    if not curves:
        out.append(f'<text x="{PANEL_W / 2}" y="{H / 2}" text-anchor="middle">no curves for this experiment</text>')
    for i, c in enumerate(curves):
        out.extend(_panel(c, 30 + i * PANEL_H))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _panel(c, top: float) -> list[str]:
    tx = np.log10 if c.logx else (lambda v: np.asarray(v, dtype=float))
    xs, ys = tx(np.asarray(c.x, dtype=float)), np.asarray(c.y, dtype=float)
    ok = np.isfinite(xs) & np.isfinite(ys)
    xs, ys = xs[ok], ys[ok]
    allx, ally = list(xs), list(ys)
    if c.theory_x is not None:
        txs, tys = tx(np.asarray(c.theory_x, dtype=float)), np.asarray(c.theory_y, dtype=float)
        allx += list(txs)
        ally += list(tys)
    x0, x1 = (min(allx), max(allx)) if allx else (0.0, 1.0)
    y0, y1 = (min(ally), max(ally)) if ally else (0.0, 1.0)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5 * (abs(y0) or 1), y1 + 0.5 * (abs(y1) or 1)
    left, right, ptop, bottom = PAD, PANEL_W - 20, top + 20, top + PANEL_H - 40

    def px(x):
        return left + (x - x0) / (x1 - x0) * (right - left)

    def py(y):
        return bottom - (y - y0) / (y1 - y0) * (bottom - ptop)

    def d_attr(X, Y):
        return " ".join(f"{'M' if k == 0 else 'L'} {px(x):.2f} {py(y):.2f}" for k, (x, y) in enumerate(zip(X, Y)))

    xl = f"log10 {c.xlabel}" if c.logx else c.xlabel
    g = [
        f'<rect x="{left}" y="{ptop}" width="{right - left}" height="{bottom - ptop}" fill="none" stroke="#888"/>',
        f'<text x="{(left + right) / 2}" y="{top + 14}" text-anchor="middle">{escape(c.name)}</text>',
        f'<text x="{(left + right) / 2}" y="{bottom + 30}" text-anchor="middle">{escape(xl)}</text>',
        f'<text x="14" y="{(ptop + bottom) / 2}" text-anchor="middle" transform="rotate(-90 14 {(ptop + bottom) / 2})">{escape(c.ylabel)}</text>',
        f'<text x="{left}" y="{bottom + 14}" text-anchor="middle">{x0:.3g}</text>',
        f'<text x="{right}" y="{bottom + 14}" text-anchor="middle">{x1:.3g}</text>',
        f'<text x="{left - 4}" y="{bottom}" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{left - 4}" y="{ptop + 8}" text-anchor="end">{y1:.3g}</text>',
        f'<path d="{d_attr(xs, ys)}" fill="none" stroke="#1f5fa8" stroke-width="1.5"/>',
    ]
    g += [f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="#1f5fa8"/>' for x, y in zip(xs, ys)]
    if c.theory_x is not None:
        g.append(f'<path d="{d_attr(txs, tys)}" fill="none" stroke="#c03030" stroke-width="1.2" stroke-dasharray="6 4"/>')
    return g


# ---------------------------------------------------------------------------
# files


def emit(report: Report, fmt: str, outdir) -> Path:
    """Write one view of ``report`` to ``outdir/<experiment>.<fmt>``."""
    views = {"json": report.to_json, "csv": report.to_csv, "svg": report.to_svg}
    if fmt not in views:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(outdir) / f"{report.config.experiment}.{fmt}"
    text = views[fmt]()
    try:
        path.write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path
