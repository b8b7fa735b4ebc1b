"""Thick-point counts, exponent regression and the limiting laws they are compared with.

All logarithms are natural.  Thresholds are inclusive (``>=``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, PreconditionError
from .intersection import KernelSpec, intersection_weights
from .lattice_walk import LocalTimeField
from .planar_paths import PlanarPath
from ._binning import disc_sums


@dataclass(frozen=True)
class ThickCount:
    n: int
    param: float
    threshold_value: float
    count: int
    max_value: int


def count_thick_points(pf, b: float, n: int | None = None) -> ThickCount:
    """Points with ``L_n^X(x) L_n^X'(x) >= b^2 (log n)^4`` and the maximal product."""
    n = pf.n if n is None else int(n)
    if n < 2:
        raise PreconditionError(f"need n >= 2 so that log n > 0, got {n}")
    if not b > 0:
        raise PreconditionError("b must be positive")
    # (b log^2 n)^2 rather than b^2 log^4 n: the inner product can equal an
    # integer square root exactly, so equality cases are representable
    thr = (b * math.log(n) ** 2) ** 2
    return ThickCount(n, b, thr, int(np.count_nonzero(pf.product >= thr)), pf.max())


def single_walk_thick(field: LocalTimeField, a: float, n: int | None = None) -> ThickCount:
    """Points with ``L_n(x) >= a (log n)^2`` and ``T_n = max L_n``.

    ``n`` defaults to the horizon of ``field``.
    """
    n = field.total_steps if n is None else int(n)
    if n < 2:
        raise PreconditionError(f"need n >= 2 so that log n > 0, got {n}")
    if not a > 0:
        raise PreconditionError("a must be positive")
    thr = a * math.log(n) ** 2
    return ThickCount(n, a, thr, int(np.count_nonzero(field.counts >= thr)), field.max())


# ---------------------------------------------------------------------------
# regression


@dataclass
class ExponentFit:
    slope: float | None
    stderr: float | None
    intercept: float | None
    n_values: np.ndarray
    mean_log_counts: np.ndarray
    excluded: list = field(default_factory=list)
    diagnostic: str = ""

    @property
    def defined(self) -> bool:
        return self.slope is not None


def ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Slope, its standard error and intercept of an ordinary least-squares line."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    slope = float(((x - xm) * (y - ym)).sum()) / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    dof = len(x) - 2
    se = math.sqrt(float((resid**2).sum()) / dof / sxx) if dof > 0 else float("nan")
    return slope, se, float(intercept)


def exponent_estimate(series: Sequence[tuple[float, float]]) -> ExponentFit:
    """Slope of ``log M_n`` against ``log n``.

    ``series`` may repeat an ``n`` (one entry per replica); log-counts are then
    averaged per ``n`` before the fit.  Zero counts are excluded and listed in
    ``excluded``; when fewer than three distinct ``n`` keep a positive count the
    slope is left undefined.
    """
    arr = np.asarray(series, dtype=float).reshape(-1, 2)
    ns = np.unique(arr[:, 0])
    if len(ns) < 3:
        raise PreconditionError(f"need at least 3 distinct n values, got {len(ns)}")
    xs, ys, excluded = [], [], []
    for n in ns:
        m = arr[arr[:, 0] == n, 1]
        pos = m[m > 0]
        if len(pos) < len(m):
            excluded.append((float(n), int(len(m) - len(pos))))
        if len(pos):
            xs.append(math.log(n))
            ys.append(float(np.log(pos).mean()))
    xs, ys = np.array(xs), np.array(ys)
    if len(xs) < 3:
        diag = "all counts are zero" if len(xs) == 0 else f"only {len(xs)} n values have positive counts"
        return ExponentFit(None, None, None, ns, ys, excluded, diag)
    slope, se, icpt = ols(xs, ys)
    diag = f"excluded zero counts at {excluded}" if excluded else ""
    return ExponentFit(slope, se, icpt, np.exp(xs), ys, excluded, diag)


# ---------------------------------------------------------------------------
# coarse spectrum


@dataclass
class SpectrumCurve:
    """Exponent estimates per parameter value, with the predicted law attached."""

    name: str
    params: np.ndarray
    estimates: np.ndarray
    stderr: np.ndarray
    replicas: np.ndarray
    predicted: float | Callable | None = None
    flags: list = field(default_factory=list)

    def points(self):
        return list(zip(self.params.tolist(), self.estimates.tolist(), self.stderr.tolist(), self.replicas.tolist()))


def coarse_spectrum_lebesgue(
    pathW: PlanarPath,
    pathW2: PlanarPath,
    a: float,
    eps_list: Sequence[float],
    pitch: float,
    kernel: KernelSpec | None = None,
    box: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0),
) -> SpectrumCurve:
    """``log Leb{x : I(D(x,eps)) >= a^2 eps^2 (log eps)^4} / log eps`` per ``eps``.

    The Lebesgue measure is ``pitch^2`` times the number of qualifying centers of
    a regular grid over ``box``.  An empty set at some ``eps`` gives ``-inf`` and a
    flag.  The predicted limit is ``2a``.
    """
    if not 0 < a < 1:
        raise DomainError("coarse spectrum needs 0 < a < 1")
    eps = np.asarray(eps_list, dtype=float)
    kernel = kernel or KernelSpec(eps_f=max(2.0 * math.sqrt(max(pathW.dt, pathW2.dt)), pitch))
    floor = max(2.0 * math.sqrt(max(pathW.dt, pathW2.dt)), pitch, kernel.eps_f)
    if np.any(eps <= floor) or np.any(eps >= 1):
        raise PreconditionError(f"eps values must lie in ({floor:.3g}, 1)")
    w = intersection_weights(pathW, pathW2, kernel)
    carrier = w > 0
    pts, w = pathW.points[carrier], w[carrier]
    x0, x1, y0, y1 = box
    gx = np.arange(x0 + pitch / 2, x1, pitch)
    gy = np.arange(y0 + pitch / 2, y1, pitch)
    X, Y = np.meshgrid(gx, gy)
    centers = np.stack([X.ravel(), Y.ravel()], axis=1)
    est = np.empty(len(eps))
    flags = []
    for k, e in enumerate(eps):
        # only centers within e of a carrying sample can qualify
        mass = disc_sums(centers, pts, w, e) if len(pts) else np.zeros(len(centers))
        hit = np.count_nonzero(mass >= a * a * e * e * math.log(e) ** 4)
        if hit == 0:
            est[k] = -math.inf
            flags.append((float(e), "empty"))
        else:
            est[k] = math.log(hit * pitch * pitch) / math.log(e)
    return SpectrumCurve(
        "coarse-lebesgue", eps, est, np.zeros(len(eps)), np.ones(len(eps), dtype=int), predicted=2.0 * a, flags=flags
    )


# ---------------------------------------------------------------------------
# theory


def _need(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


def pair_max_constant() -> float:
    """``lim T_n^{X,X'} / (log n)^4``."""
    return 1.0 / (4.0 * math.pi**2)


def pair_count_exponent(b: float) -> float:
    _need(0 < b < 1 / (2 * math.pi), "pair thick points need 0 < b < 1/(2 pi)")
    return 1.0 - 2.0 * math.pi * b


def single_max_constant() -> float:
    """``lim T_n^X / (log n)^2``."""
    return 1.0 / math.pi


def single_count_exponent(a: float) -> float:
    _need(0 < a < 1 / math.pi, "single-walk thick points need 0 < a < 1/pi")
    return 1.0 - math.pi * a


def disc_occupation_sup() -> float:
    return 2.0


def disc_thick_dimension(a: float) -> float:
    _need(0 < a <= 2, "occupation thick points need 0 < a <= 2")
    return 2.0 - a


def kset_occupation_sup(area: float) -> float:
    _need(0 < area <= math.pi, "K must have area in (0, pi]")
    return 2.0 * area / math.pi


def kset_thick_dimension(a: float, area: float) -> float:
    _need(0 < area <= math.pi, "K must have area in (0, pi]")
    _need(0 < a <= 2 * area / math.pi, "K-thick points need a <= 2|K|/pi")
    return 2.0 - a * math.pi / area


def intersection_sup() -> float:
    return 1.0


def intersection_dimension(a: float) -> float:
    _need(0 < a <= 1, "thick intersection points need 0 < a <= 1")
    return 2.0 - 2.0 * a


def coarse_exponent(a: float) -> float:
    _need(0 < a < 1, "coarse spectrum needs 0 < a < 1")
    return 2.0 * a


def stable_sup(beta: float) -> float:
    _need(0 < beta < 2, "stable index needs 0 < beta < 2")
    return beta * beta / 4.0


def stable_dimension(a: float, beta: float) -> float:
    _need(0 < beta < 2, "stable index needs 0 < beta < 2")
    _need(0 < a <= beta / 2, "Brownian-stable thick points need 0 < a <= beta/2")
    return beta - 2.0 * a


def mfold_sup(m: int) -> float:
    _need(int(m) == m and m >= 1, "m must be a positive integer")
    return (2.0 / m) ** m


def mfold_dimension(a: float, m: int) -> float:
    _need(int(m) == m and m >= 1, "m must be a positive integer")
    _need(0 < a <= 2.0 / m, "m-fold thick points need 0 < a <= 2/m")
    return 2.0 - m * a


def theory_curves() -> dict:
    """Named limiting constants (floats) and exponent laws (callables)."""
    return {
        "pair_max_constant": pair_max_constant(),
        "single_max_constant": single_max_constant(),
        "disc_occupation_sup": disc_occupation_sup(),
        "intersection_sup": intersection_sup(),
        "pair_count_exponent": pair_count_exponent,
        "single_count_exponent": single_count_exponent,
        "disc_thick_dimension": disc_thick_dimension,
        "kset_occupation_sup": kset_occupation_sup,
        "kset_thick_dimension": kset_thick_dimension,
        "intersection_dimension": intersection_dimension,
        "coarse_exponent": coarse_exponent,
        "stable_sup": stable_sup,
        "stable_dimension": stable_dimension,
        "mfold_sup": mfold_sup,
        "mfold_dimension": mfold_dimension,
    }
