"""Registered experiments.

Each experiment declares a parameter schema, its sweep columns (in CSV order)
and a per-replica task.  A replica returns rows ``(sweep, metric, value)``
where ``sweep`` is a tuple aligned with the sweep columns (``None`` where a
column does not apply) together with the number of simulated steps.  Rows that
need every replica (regression slopes, ratios to an oracle) come from
``derive``; theory values come from ``theory``.  Both only read the records,
so every aggregate can be recomputed from the per-replica section of a report.

Defaults are small enough to run in seconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .. import operators as ops
from .. import spectra
from ..intersection import KernelSpec, intersection_local_time_continuum, perfect_point_test, product_local_time
from ..lattice_walk import (
    lattice_green_exact,
    local_time_prefixes,
    run_until_exit,
    simulate_srw,
    visit_ranks,
    hitting_prob_zero,
)
from ..planar_paths import ExitRadius, KSet, occupation_profile, simulate_bm, simulate_stable
from .._binning import disc_sums
from ..rng import generator, mix
from .config import InvalidParameterError, Param, coerce



@dataclass
class ReplicaOutput:
    rows: list
    steps: int = 0


@dataclass
class Curve:
    """Points to plot, optionally with a theory overlay drawn dashed."""

    name: str
    x: list
    y: list
    xlabel: str
    ylabel: str
    theory_x: list | None = None
    theory_y: list | None = None
    logx: bool = False

    def as_dict(self) -> dict:
        d = {"name": self.name, "x": self.x, "y": self.y, "xlabel": self.xlabel, "ylabel": self.ylabel, "logx": self.logx}
        d["theory"] = None if self.theory_x is None else {"x": self.theory_x, "y": self.theory_y}
        return d


@dataclass
class Experiment:
    name: str
    doc: str
    params: dict
    sweep: tuple
    task: Callable  # (params, seed) -> ReplicaOutput
    check: Callable | None = None  # (params) -> None, raises InvalidParameterError
    derive: Callable | None = None  # (params, records) -> list of (sweep, metric, value, stderr, n)
    theory: Callable | None = None  # (params) -> list of (sweep, metric, value)
    curves: Callable | None = None  # (params, aggregates, theory) -> list[Curve]
    default_replicas: int = 2

    def validate(self, given: dict) -> dict:
        unknown = sorted(set(given) - set(self.params))
        if unknown:
            raise InvalidParameterError(
                f"{self.name}: unknown parameter(s) {unknown}; accepted: {', '.join(self.params)}"
            )
        out = {}
        for name, spec in self.params.items():
            out[name] = coerce(name, spec, given[name]) if name in given else coerce(name, spec, spec.default)
        if self.check:
            self.check(out)
        return out


def _need(cond: bool, msg: str):
    if not cond:
        raise InvalidParameterError(msg)


def _pos_int(p, *names):
    for n in names:
        _need(p[n] >= 1, f"{n} must be >= 1")


def _horizons(p) -> list[int]:
    return [2**m for m in range(p["m_min"], p["m_max"] + 1)]


def _check_dyadic(p):
    _need(1 <= p["m_min"], "m_min must be >= 1")
    _need(p["m_max"] - p["m_min"] >= 2, "need at least three horizons (m_max - m_min >= 2)")
    _need(p["m_max"] <= 26, "m_max above 26 exceeds the memory budget")


def _log_or_nan(c: int) -> float:
    return math.log(c) if c > 0 else math.nan


def _exponent_rows(records, values, width: int, pos: int = 0):
    """Exponent fits per sweep value from replica ``count`` rows keyed ``(value, n)``.

    The exponent is the fit to the mean log counts over all replicas.  Its
    stderr is the spread of per-replica fits, because the horizons of one
    replica are prefixes of the same walks and their counts are correlated;
    the residual error of a single fit would understate it.
    """
    out = []
    for v in values:
        per_replica = [
            [(key[1], val) for key, metric, val in rows if metric == "count" and key[pos] == v] for rows in records
        ]
        fit = spectra.exponent_estimate([pt for series in per_replica for pt in series])
        sweep = tuple(v if i == pos else None for i in range(width))
        n_rep = len(records)
        if not fit.defined:
            out.append((sweep, "exponent", math.nan, math.nan, n_rep))
            continue
        slopes = []
        for series in per_replica:
            if len({n for n, c in series if c > 0}) >= 3:
                one = spectra.exponent_estimate(series)
                if one.defined:
                    slopes.append(one.slope)
        se = float(np.std(slopes, ddof=1) / math.sqrt(len(slopes))) if len(slopes) > 1 else fit.stderr
        out.append((sweep, "exponent", fit.slope, se, n_rep))
    return out


def _mean_table(records, metric):
    """``{sweep: [values...]}`` for one metric across replicas."""
    tab: dict = {}
    for rows in records:
        for key, m, val in rows:
            if m == metric:
                tab.setdefault(key, []).append(val)
    return tab


def _finite_mean(vals) -> float:
    v = np.asarray(vals, dtype=float)
    v = v[np.isfinite(v)]
    return float(v.mean()) if len(v) else math.nan


# ---------------------------------------------------------------------------
# pair-thick


def _pair_check(p):
    _check_dyadic(p)
    for b in p["b"]:
        _need(0 < b < 1 / (2 * math.pi), f"b = {b} is outside the admissible range 0 < b < 1/(2π)")


def _pair_task(p, seed):
    ns = _horizons(p)
    N = ns[-1]
    fx = local_time_prefixes(simulate_srw(mix(seed, 0), N), ns)
    fy = local_time_prefixes(simulate_srw(mix(seed, 1), N), ns)
    rows = []
    for a, b, n in zip(fx, fy, ns):
        pf = product_local_time([a, b])
        rows.append(((None, n), "max_ratio", pf.max() / math.log(n) ** 4))
        for bb in p["b"]:
            c = spectra.count_thick_points(pf, bb).count
            rows.append(((bb, n), "count", c))
            rows.append(((bb, n), "log_count", _log_or_nan(c)))
    return ReplicaOutput(rows, 2 * N)


def _pair_derive(p, records):
    return _exponent_rows(records, p["b"], 2)


def _pair_theory(p):
    rows = [((b, None), "exponent", spectra.pair_count_exponent(b)) for b in p["b"]]
    rows += [((None, n), "max_ratio", spectra.pair_max_constant()) for n in _horizons(p)]
    return rows


def _loglog_curves(p, agg, pname, slope_of):
    """Mean log count against log n, with the predicted slope drawn through the centroid."""
    curves = []
    ns = _horizons(p)
    for v in p[pname]:
        pts = [(math.log(n), agg[((v, n), "log_count")][0]) for n in ns]
        pts = [(x, y) for x, y in pts if math.isfinite(y)]
        if not pts:
            continue
        xs, ys = [x for x, _ in pts], [y for _, y in pts]
        s = slope_of(v)
        xm, ym = float(np.mean(xs)), float(np.mean(ys))
        curves.append(
            Curve(
                f"log count, {pname} = {v:g}", xs, ys, "log n", "mean log count",
                [xs[0], xs[-1]], [ym + s * (xs[0] - xm), ym + s * (xs[-1] - xm)],
            )
        )
    return curves


def _pair_curves(p, agg, theory):
    ns = _horizons(p)
    curves = _loglog_curves(p, agg, "b", spectra.pair_count_exponent)
    c = spectra.pair_max_constant()
    curves.append(
        Curve("max product / (log n)^4", [float(n) for n in ns], [agg[((None, n), "max_ratio")][0] for n in ns],
              "n", "T_n / (log n)^4", [float(ns[0]), float(ns[-1])], [c, c], logx=True)
    )
    return curves


# ---------------------------------------------------------------------------
# erdos-taylor


def _et_check(p):
    _check_dyadic(p)
    for a in p["a"]:
        _need(0 < a < 1 / math.pi, f"a = {a} is outside the admissible range 0 < a < 1/π")


def _et_task(p, seed):
    ns = _horizons(p)
    rank = visit_ranks(simulate_srw(mix(seed, 0), ns[-1]))
    cmax = np.maximum.accumulate(rank)
    rows = []
    for n in ns:
        rows.append(((None, n), "max_ratio", int(cmax[n]) / math.log(n) ** 2))
        head = rank[: n + 1]
        for a in p["a"]:
            # points with L_n >= m are exactly the m-th visits among steps 0..n
            m = max(1, math.ceil(a * math.log(n) ** 2))
            c = int(np.count_nonzero(head == m))
            rows.append(((a, n), "count", c))
            rows.append(((a, n), "log_count", _log_or_nan(c)))
    return ReplicaOutput(rows, ns[-1])


def _et_derive(p, records):
    out = _exponent_rows(records, p["a"], 2)
    ns = _horizons(p)
    tab = _mean_table(records, "max_ratio")
    means = [_finite_mean(tab[(None, n)]) for n in ns]
    slope, se, _ = spectra.ols(np.log(ns), means)
    out.append(((None, None), "max_ratio_slope", slope, se, len(records)))
    return out


def _et_theory(p):
    rows = [((a, None), "exponent", spectra.single_count_exponent(a)) for a in p["a"]]
    rows += [((None, n), "max_ratio", spectra.single_max_constant()) for n in _horizons(p)]
    return rows


def _et_curves(p, agg, theory):
    ns = _horizons(p)
    curves = _loglog_curves(p, agg, "a", spectra.single_count_exponent)
    c = spectra.single_max_constant()
    curves.append(
        Curve("max local time / (log n)^2", [float(n) for n in ns], [agg[((None, n), "max_ratio")][0] for n in ns],
              "n", "T_n / (log n)^2", [float(ns[0]), float(ns[-1])], [c, c], logx=True)
    )
    return curves


# ---------------------------------------------------------------------------
# coarse-spectrum


def _coarse_check(p):
    for a in p["a"]:
        _need(0 < a < 1, f"a = {a} is outside the admissible range 0 < a < 1")
    _need(p["dt"] > 0 and p["pitch"] > 0 and p["eps_f"] > 0, "dt, pitch and eps_f must be positive")
    floor = max(2 * math.sqrt(p["dt"]), p["pitch"], p["eps_f"])
    for e in p["eps"]:
        _need(floor < e < 1, f"eps = {e} must lie in ({floor:.3g}, 1) for dt, pitch and eps_f given")


def _coarse_task(p, seed):
    w1 = simulate_bm(mix(seed, 0), p["dt"], ExitRadius(1.0))
    w2 = simulate_bm(mix(seed, 1), p["dt"], ExitRadius(1.0))
    ker = KernelSpec(eps_f=p["eps_f"])
    rows = []
    for a in p["a"]:
        curve = spectra.coarse_spectrum_lebesgue(w1, w2, a, p["eps"], p["pitch"], ker)
        for e, est in zip(p["eps"], curve.estimates):
            rows.append(((a, e), "exponent", float(est)))
    return ReplicaOutput(rows, len(w1) + len(w2))


def _coarse_theory(p):
    return [((a, None), "exponent", spectra.coarse_exponent(a)) for a in p["a"]]


def _coarse_curves(p, agg, theory):
    out = []
    for a in p["a"]:
        xs = list(p["eps"])
        ys = [agg[((a, e), "exponent")][0] for e in xs]
        t = spectra.coarse_exponent(a)
        out.append(Curve(f"coarse exponent, a = {a:g}", xs, ys, "eps", "exponent", [min(xs), max(xs)], [t, t], logx=True))
    return out


# ---------------------------------------------------------------------------
# kset-occupation


def _kset(p) -> KSet:
    shape, h = p["shape"], p["h"]
    if shape == "disc":
        return KSet.disc(h)
    if shape == "half-disc":
        return KSet.half_disc(h)
    return KSet.read(shape, h)


def _kset_check(p):
    _need(0 < p["h"] <= 0.25, "h must lie in (0, 1/4]")
    if p["shape"] not in ("disc", "half-disc"):
        _need(Path(p["shape"]).is_file(), f"shape must be 'disc', 'half-disc' or a readable K file, got {p['shape']!r}")
    floor = max(2 * math.sqrt(p["dt"]), p["pitch"])
    for e in p["eps"]:
        _need(floor < e < 1, f"eps = {e} must lie in ({floor:.3g}, 1)")


def _kset_task(p, seed):
    path = simulate_bm(mix(seed, 0), p["dt"], ExitRadius(1.0))
    k = _kset(p)
    g = np.arange(-1 + p["pitch"] / 2, 1, p["pitch"])
    X, Y = np.meshgrid(g, g)
    centers = np.stack([X.ravel(), Y.ravel()], axis=1)
    disc = occupation_profile(path, centers, p["eps"], pitch=p["pitch"])
    kp = occupation_profile(path, centers, p["eps"], kset=k, pitch=p["pitch"])
    rows = []
    for j, e in enumerate(p["eps"]):
        rows.append(((e,), "disc_sup", float(disc.sup[j])))
        rows.append(((e,), "kset_sup", float(kp.sup[j])))
        rows.append(((e,), "containment_violations", int(np.count_nonzero(kp.occupation[:, j] > disc.occupation[:, j]))))
    return ReplicaOutput(rows, len(path))


def _kset_theory(p):
    return [((e,), m, spectra.disc_occupation_sup()) for e in p["eps"] for m in ("disc_sup", "kset_sup")]


def _kset_curves(p, agg, theory):
    xs = list(p["eps"])
    out = []
    for m in ("disc_sup", "kset_sup"):
        out.append(Curve(m, xs, [agg[((e,), m)][0] for e in xs], "eps", "sup ratio", [min(xs), max(xs)], [2.0, 2.0], logx=True))
    return out


# ---------------------------------------------------------------------------
# excursions


def _exc_check(p):
    _need(p["n"] >= 2, "n must be >= 2")
    _need(0 < p["eps1"] <= 0.25, "eps1 must lie in (0, 1/4]")
    _pos_int(p, "points")
    for a in p["a"]:
        _need(a > 0, "a must be positive")
    inner = p["eps1"] * math.factorial(p["n"]) ** -3
    _need(inner >= 4 * math.sqrt(p["dt"]), f"dt must be at most (eps_n/4)^2 = {(inner / 4) ** 2:.3g}")


def _exc_task(p, seed):
    g = generator(mix(seed, 1))
    # centers uniform in D(0, 1/4); the path runs until it leaves D(0, 2.5), past every D(x, 2)
    rad = 0.25 * np.sqrt(g.uniform(size=p["points"]))
    ang = g.uniform(0, 2 * math.pi, size=p["points"])
    centers = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    path = simulate_bm(mix(seed, 0), p["dt"], ExitRadius(2.5))
    rows = []
    for a in p["a"]:
        res = [perfect_point_test(path, x, p["n"], a, eps1=p["eps1"]) for x in centers]
        rows.append(((a,), "perfect_fraction", float(np.mean([r.perfect for r in res]))))
        rows.append(((a,), "mean_N2", float(np.mean([r.counts[0, 1] for r in res]))))
    return ReplicaOutput(rows, len(path))


def _exc_theory(p):
    return [((a,), "mean_N2", 3 * a * 4 * math.log(2)) for a in p["a"]]


def _exc_curves(p, agg, theory):
    xs = list(p["a"])
    return [
        Curve("excursions at k = 2", xs, [agg[((a,), "mean_N2")][0] for a in xs], "a", "mean N_2",
              xs, [3 * a * 4 * math.log(2) for a in xs]),
        Curve("perfect fraction", xs, [agg[((a,), "perfect_fraction")][0] for a in xs], "a", "fraction"),
    ]


# ---------------------------------------------------------------------------
# kac-lattice


def _kac_task(p, seed):
    v1 = np.empty(p["walks"])
    steps = 0
    for j in range(p["walks"]):
        rec = run_until_exit(mix(seed, j), p["R"])
        v1[j] = rec.visits_to_origin
        steps += rec.exit_step
    return ReplicaOutput([((), "visits_mean", float(v1.mean())), ((), "visits_sq_mean", float((v1 * v1).mean()))], steps)


def _kac_theory(p):
    G = lattice_green_exact(p["R"]).origin_value
    return [
        ((), "visits_mean", G),
        ((), "visits_sq_mean", 2 * G * G - G),
        ((), "visits_sq_mean_factorial_bound", 2 * G * G),
    ]


def _kac_curves(p, agg, theory):
    G = lattice_green_exact(p["R"]).origin_value
    return [
        Curve("visit moments", [1.0, 2.0], [agg[((), "visits_mean")][0], agg[((), "visits_sq_mean")][0]],
              "k", "E V^k", [1.0, 2.0], [G, 2 * G * G - G])
    ]


# ---------------------------------------------------------------------------
# hitting-prob


def _hit_check(p):
    _pos_int(p, "walks")
    for r in p["r"]:
        _need(0 <= r < p["R"], f"r = {r} must satisfy 0 <= r < R")


def _hit_task(p, seed):
    rows = []
    for j, r in enumerate(p["r"]):
        est, _ = hitting_prob_zero(p["R"], r, p["walks"], mix(seed, j))
        rows.append(((r,), "hit_fraction", est))
    return ReplicaOutput(rows, 0)


def _hit_prediction(R, r):
    return math.log(R / r) / math.log(R) if r > 0 else 1.0


def _hit_theory(p):
    return [((r,), "hit_fraction", _hit_prediction(p["R"], r)) for r in p["r"]]


def _hit_curves(p, agg, theory):
    xs = list(p["r"])
    tx = list(np.linspace(max(min(xs), 1.0), max(xs), 32))
    return [
        Curve("hit origin first", xs, [agg[((r,), "hit_fraction")][0] for r in xs], "r", "probability",
              tx, [_hit_prediction(p["R"], r) for r in tx])
    ]


# ---------------------------------------------------------------------------
# green-disc-check


def _green_task(p, seed):
    g = generator(mix(seed, 0))
    r, m = p["r"], p["pairs"]

    def draw():
        rad = 0.5 * r * np.sqrt(g.uniform(size=m))
        return rad * np.exp(1j * g.uniform(0, 2 * math.pi, size=m))

    x, y = draw(), draw()
    dev = np.abs(math.pi * ops.green_disc_values(r, x, y) - np.log(r / np.abs(x - y)))
    bound = math.log(4 / 3) + 1e-12
    return ReplicaOutput(
        [((), "max_deviation", float(dev.max())), ((), "violations", int(np.count_nonzero(dev > bound)))], 0
    )


def _green_theory(p):
    return [((), "max_deviation", math.log(4 / 3)), ((), "violations", 0)]


# ---------------------------------------------------------------------------
# lambda-beta


def _lambda_check(p):
    _need(0 < p["beta"] < 2, "beta must lie in (0, 2)")
    for h in p["h"]:
        _need(0 < h <= 1 / 8, f"h = {h} must lie in (0, 1/8]")


def _lambda_task(p, seed):
    rows = []
    steps = 0
    for h in p["h"]:
        res = ops.lambda_beta(p["beta"], h)
        rows.append(((h,), "lambda", res.value))
        rows.append(((h,), "iterations", res.iterations))
        steps += res.iterations
    return ReplicaOutput(rows, steps)


def _lambda_derive(p, records):
    if len(p["h"]) < 2:
        return []
    tab = _mean_table(records, "lambda")
    hs = sorted(p["h"])
    fine, coarse = _finite_mean(tab[(hs[0],)]), _finite_mean(tab[(hs[1],)])
    return [((None,), "refinement_reldiff", abs(coarse - fine) / fine, math.nan, len(records))]


def _lambda_curves(p, agg, theory):
    xs = list(p["h"])
    return [Curve(f"Lambda, beta = {p['beta']:g}", xs, [agg[((h,), "lambda")][0] for h in xs], "h", "Lambda", logx=True)]


# ---------------------------------------------------------------------------
# intersect-moment


def _im_check(p):
    _need(0 < p["r1"] <= 0.5, "r1 must lie in (0, 1/2]")
    _need(p["eps_f"] >= 2 * math.sqrt(p["dt"]), "eps_f must be at least 2 sqrt(dt)")
    _pos_int(p, "oracle_samples")


def _starts(p):
    return (p["r1"], 0.0), (-p["r1"], 0.0)


def _im_task(p, seed):
    x0, x0p = _starts(p)
    w1 = simulate_bm(mix(seed, 0), p["dt"], ExitRadius(1.0), start=x0)
    w2 = simulate_bm(mix(seed, 1), p["dt"], ExitRadius(1.0), start=x0p)
    est = intersection_local_time_continuum(w1, w2, (0.0, 0.0), p["r1"], KernelSpec(eps_f=p["eps_f"]))
    pts = w1.points
    occ = np.count_nonzero(pts[:, 0] ** 2 + pts[:, 1] ** 2 < p["r1"] ** 2) * w1.dt
    return ReplicaOutput([((), "intersection", est), ((), "occupation", float(occ))], len(w1) + len(w2))


def _im_oracles(p):
    x0, x0p = _starts(p)
    oracle, ose = ops.intersection_first_moment_mc(1.0, p["r1"], x0, x0p, p["oracle_samples"], p["oracle_seed"])
    smooth, sse = ops.intersection_first_moment_smoothed_mc(
        1.0, p["r1"], x0, x0p, p["eps_f"], p["oracle_samples"], p["oracle_seed"]
    )
    return oracle, ose, smooth, sse, ops.disc_occupation_mean(1.0, p["r1"], x0)


def _im_derive(p, records):
    oracle, ose, smooth, sse, occ_exact = _im_oracles(p)
    vals = np.array([v for rows in records for _, m, v in rows if m == "intersection"])
    occ = np.array([v for rows in records for _, m, v in rows if m == "occupation"])
    n = len(vals)
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    ose_ = float(occ.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return [
        ((), "oracle", oracle, ose, 0),
        ((), "ratio_to_oracle", mean / oracle, se / oracle, n),
        # smoothed / exact - 1: the bias due to the kernel scale alone
        ((), "kernel_bias", smooth / oracle - 1.0, math.hypot(sse, ose) / oracle, 0),
        # simulated / exact occupation of D(0, r1) - 1: the time-step bias of one path
        ((), "dt_bias", float(occ.mean()) / occ_exact - 1.0, ose_ / occ_exact, n),
    ]


def _im_theory(p):
    x0, _ = _starts(p)
    return [((), "occupation", ops.disc_occupation_mean(1.0, p["r1"], x0))]


# ---------------------------------------------------------------------------
# stable-potential-check


def _stable_check(p):
    _need(0 < p["beta"] < 2, "beta must lie in (0, 2)")
    _need(p["delta"] > 0 and p["T"] > p["dt"] > 0, "need delta > 0 and T > dt > 0")
    _pos_int(p, "centers", "paths")
    for z in p["radius"]:
        _need(z > p["delta"], f"radius {z} must exceed delta")


def _stable_task(p, seed):
    beta, delta, M = p["beta"], p["delta"], p["centers"]
    ang = 2 * math.pi * np.arange(M) / M
    acc = {z: 0.0 for z in p["radius"]}
    steps = 0
    for j in range(p["paths"]):
        path = simulate_stable(mix(seed, j), beta, p["dt"], p["T"])
        steps += len(path)
        rad = np.hypot(path.points[:, 0], path.points[:, 1])
        for z in p["radius"]:
            # rotating the center averages over the isotropic law
            near = path.points[np.abs(rad - z) < delta]
            centers = np.stack([z * np.cos(ang), z * np.sin(ang)], axis=1)
            occ = disc_sums(centers, near, 1.0, delta) * path.dt if len(near) else np.zeros(M)
            acc[z] += float(occ.mean()) / (math.pi * delta * delta)
    return ReplicaOutput([((z,), "density", acc[z] / p["paths"]) for z in p["radius"]], steps)


def _stable_theory(p):
    return [((z,), "density", float(ops.stable_potential(p["beta"], (z, 0.0)))) for z in p["radius"]]


def _stable_curves(p, agg, theory):
    xs = list(p["radius"])
    tx = list(np.linspace(min(xs) * 0.8, max(xs) * 1.2, 32))
    return [
        Curve(f"occupation density, beta = {p['beta']:g}", xs, [agg[((z,), "density")][0] for z in xs], "|z|", "density",
              tx, [float(ops.stable_potential(p["beta"], (z, 0.0))) for z in tx])
    ]


# ---------------------------------------------------------------------------
# registry


def _p(kind, default, doc="", sweep=False):
    return Param(kind, default, doc, sweep)


EXPERIMENTS: dict[str, Experiment] = {
    e.name: e
    for e in [
        Experiment(
            "pair-thick",
            "Thick points of the product of two lattice local times at dyadic n.",
            {"b": _p("floats", "0.05", "threshold constants", True), "m_min": _p("int", 10), "m_max": _p("int", 13)},
            ("b", "n"), _pair_task, _pair_check, _pair_derive, _pair_theory, _pair_curves,
        ),
        Experiment(
            "erdos-taylor",
            "Maximal local time and thick-point counts of one lattice walk.",
            {"a": _p("floats", "0.1,0.2", "threshold constants", True), "m_min": _p("int", 10), "m_max": _p("int", 14)},
            ("a", "n"), _et_task, _et_check, _et_derive, _et_theory, _et_curves,
        ),
        Experiment(
            "coarse-spectrum",
            "Lebesgue measure of eps-thick intersection points against eps.",
            {
                "a": _p("floats", "0.3", "thickness levels", True),
                "eps": _p("floats", "0.2,0.1", "disc radii", True),
                "dt": _p("float", 1e-4),
                "eps_f": _p("float", 0.02),
                "pitch": _p("float", 0.02),
            },
            ("a", "eps"), _coarse_task, _coarse_check, None, _coarse_theory, _coarse_curves,
        ),
        Experiment(
            "kset-occupation",
            "Normalised occupation of discs and of scaled copies of a set K.",
            {
                "eps": _p("floats", "0.2,0.1", "scales", True),
                "shape": _p("str", "half-disc", "disc, half-disc or a K file"),
                "h": _p("float", 1 / 128),
                "dt": _p("float", 1e-4),
                "pitch": _p("float", 0.05),
            },
            ("eps",), _kset_task, _kset_check, None, _kset_theory, _kset_curves,
        ),
        Experiment(
            "excursions",
            "Excursion counts and the perfect-point test at random centers.",
            {
                "a": _p("floats", "0.5,1", "excursion targets", True),
                "n": _p("int", 2),
                "eps1": _p("float", 0.125),
                "dt": _p("float", 1.5e-5),
                "points": _p("int", 8),
            },
            ("a",), _exc_task, _exc_check, None, _exc_theory, _exc_curves,
        ),
        Experiment(
            "kac-lattice",
            "Visits to the origin before leaving a lattice disc against the Green's function.",
            {"R": _p("float", 10.0), "walks": _p("int", 200)},
            (), _kac_task, lambda p: (_need(p["R"] > 1, "R must exceed 1"), _pos_int(p, "walks")),
            None, _kac_theory, _kac_curves,
        ),
        Experiment(
            "hitting-prob",
            "Probability of hitting the origin before leaving a lattice disc.",
            {"r": _p("floats", "4,8", "start radii", True), "R": _p("float", 20.0), "walks": _p("int", 200)},
            ("r",), _hit_task, _hit_check, None, _hit_theory, _hit_curves,
        ),
        Experiment(
            "green-disc-check",
            "Deviation of the disc Green's function from log(r/|x-y|).",
            {"r": _p("float", 1.0), "pairs": _p("int", 1000)},
            (), _green_task, lambda p: (_need(p["r"] > 0, "r must be positive"), _pos_int(p, "pairs")),
            None, _green_theory, None,
        ),
        Experiment(
            "lambda-beta",
            "Operator norm of the stable potential kernel on the unit disc.",
            {"beta": _p("float", 1.0), "h": _p("floats", "1/16,1/32", "grid sides", True)},
            ("h",), _lambda_task, _lambda_check, _lambda_derive, None, _lambda_curves, default_replicas=1,
        ),
        Experiment(
            "intersect-moment",
            "Mean intersection local time of a small disc against the Green's-function integral.",
            {
                "r1": _p("float", 0.05),
                "dt": _p("float", 1e-4),
                "eps_f": _p("float", 0.02),
                "oracle_samples": _p("int", 100_000),
                "oracle_seed": _p("int", 12345),
            },
            (), _im_task, _im_check, _im_derive, _im_theory, None,
        ),
        Experiment(
            "stable-potential-check",
            "Occupation density of an isotropic stable process against its potential density.",
            {
                "radius": _p("floats", "0.7", "center distances", True),
                "beta": _p("float", 1.0),
                "dt": _p("float", 0.05),
                "T": _p("float", 50.0),
                "delta": _p("float", 0.05),
                "centers": _p("int", 44),
                "paths": _p("int", 10),
            },
            ("radius",), _stable_task, _stable_check, None, _stable_theory, _stable_curves,
        ),
    ]
}
