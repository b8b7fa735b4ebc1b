"""Product local times, discretised intersection local times, excursion counting.

The continuum estimators replace the limit in the definition of projected
intersection local time by a fixed kernel scale ``eps_f`` and a Riemann sum
over the samples of both paths::

    pi * sum_s sum_t dt dt' 1{|W_s - x| < eps} f_eps_f(W_s - W'_t)

Pairs are found through a cell index of side ``eps_f``; the sum of the terms is
taken with ``math.fsum`` so the result does not depend on pair order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from ._binning import CellIndex
from .errors import PreconditionError
from .lattice_walk import NEIGHBOURS, LatticePoint, LocalTimeField, WalkRun, unpack
from .planar_paths import INJECTED, PlanarPath

# ---------------------------------------------------------------------------
# product local times


@dataclass(frozen=True)
class ProductField:
    """Points visited by all ``m`` walks, their per-walk counts and the product."""

    keys: np.ndarray
    counts: np.ndarray  # (len(keys), m)
    product: np.ndarray
    n: int
    m: int

    def __len__(self):
        return len(self.keys)

    def points(self) -> np.ndarray:
        return unpack(self.keys)

    def as_dict(self) -> dict[LatticePoint, int]:
        return {LatticePoint(int(x), int(y)): int(p) for (x, y), p in zip(self.points(), self.product)}

    def max(self) -> int:
        return int(self.product.max()) if len(self.product) else 0


def product_local_time(fields: Sequence[LocalTimeField]) -> ProductField:
    """``prod_j L_n^{(j)}(x)`` on the common support of ``m`` local-time fields."""
    if len(fields) < 1:
        raise PreconditionError("need at least one local-time field")
    n = fields[0].total_steps
    if any(f.total_steps != n for f in fields):
        raise PreconditionError(f"horizons differ: {[f.total_steps for f in fields]}")
    keys = fields[0].keys
    for f in fields[1:]:
        keys = np.intersect1d(keys, f.keys, assume_unique=True)
    counts = np.empty((len(keys), len(fields)), dtype=np.int64)
    for j, f in enumerate(fields):
        counts[:, j] = f.counts[np.searchsorted(f.keys, keys)]
    return ProductField(keys, counts, counts.prod(axis=1), n, len(fields))


# ---------------------------------------------------------------------------
# kernels


def tent_profile(rho):
    """``(3/pi) (1 - rho)`` on the unit disc: continuous, integrates to 1."""
    rho = np.asarray(rho, dtype=float)
    return np.where(rho < 1.0, 3.0 / math.pi * (1.0 - rho), 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """Radial approximate identity ``f_eps(x) = f(|x|/eps) / eps**2``."""

    eps_f: float
    profile: Callable = field(default=tent_profile, compare=False)

    def __post_init__(self):
        if not self.eps_f > 0:
            raise PreconditionError("kernel scale must be positive")
        rho = np.linspace(0.0, 1.0, 257)
        if np.any(np.asarray(self.profile(rho)) < 0):
            raise PreconditionError("kernel profile must be non-negative")
        mass = integrate.quad(lambda r: 2 * math.pi * r * float(self.profile(r)), 0.0, 1.0, epsabs=1e-12)[0]
        if abs(mass - 1.0) > 1e-6:
            raise PreconditionError(f"kernel profile integrates to {mass}, not 1")

    def density(self, d: np.ndarray) -> np.ndarray:
        """``f_eps`` at displacement vectors ``d`` of shape ``(m, 2)``."""
        rho = np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]) / self.eps_f
        return self.profile(rho) / (self.eps_f * self.eps_f)


def _guard(kernel: KernelSpec, *paths: PlanarPath):
    dt = max(p.dt for p in paths)
    if kernel.eps_f < 2.0 * math.sqrt(dt):
        raise PreconditionError(f"kernel scale {kernel.eps_f} below resolution guard 2*sqrt(dt) = {2 * math.sqrt(dt):.3g}")


def _pair_terms(pw: np.ndarray, pw2: np.ndarray, kernel: KernelSpec):
    idx = CellIndex(pw2, kernel.eps_f)
    i, j = idx.pairs(pw)
    return i, kernel.density(pw[i] - pw2[j])


def intersection_sum(pathW: PlanarPath, pathW2: PlanarPath, x, eps: float, kernel: KernelSpec) -> float:
    """``sum_s sum_t dt dt' 1{|W_s - x| < eps} f_eps_f(W_s - W'_t)`` without the prefactor."""
    _guard(kernel, pathW, pathW2)
    if not eps > 0:
        raise PreconditionError("eps must be positive")
    x = np.asarray(x, dtype=float)
    dw = pathW.points - x
    pw = pathW.points[dw[:, 0] ** 2 + dw[:, 1] ** 2 < eps * eps]
    reach = eps + kernel.eps_f
    dw2 = pathW2.points - x
    pw2 = pathW2.points[dw2[:, 0] ** 2 + dw2[:, 1] ** 2 < reach * reach]
    _, terms = _pair_terms(pw, pw2, kernel)
    return math.fsum(terms.tolist()) * pathW.dt * pathW2.dt


def intersection_local_time_continuum(pathW: PlanarPath, pathW2: PlanarPath, x, eps: float, kernel: KernelSpec) -> float:
    """Discretised projected intersection local time of ``D(x, eps)`` for two paths."""
    return math.pi * intersection_sum(pathW, pathW2, x, eps, kernel)


def intersection_wx(pathW: PlanarPath, pathX: PlanarPath, lambda_norm: float, x, eps: float, kernel: KernelSpec) -> float:
    """Same double sum as :func:`intersection_local_time_continuum`, normalised by ``pi / lambda_norm``."""
    if not lambda_norm > 0:
        raise PreconditionError("lambda_norm must be positive")
    return math.pi * intersection_sum(pathW, pathX, x, eps, kernel) / lambda_norm


def intersection_weights(pathW: PlanarPath, pathW2: PlanarPath, kernel: KernelSpec) -> np.ndarray:
    """Per-sample mass ``pi dt dt' sum_t f_eps_f(W_s - W'_t)`` carried by each ``W_s``.

    Summing these weights over samples in a set ``A`` gives the estimator for ``A``.
    """
    _guard(kernel, pathW, pathW2)
    i, terms = _pair_terms(pathW.points, pathW2.points, kernel)
    return math.pi * pathW.dt * pathW2.dt * np.bincount(i, weights=terms, minlength=len(pathW))


# ---------------------------------------------------------------------------
# excursions

OUTER_TO_INNER = "outer-to-inner"
ROUND_TRIP = "round-trip"


def _positions(path) -> tuple[np.ndarray, bool]:
    if isinstance(path, WalkRun):
        return path.path(), True
    if isinstance(path, PlanarPath):
        return path.points, False
    arr = np.asarray(path)
    return arr.reshape(-1, 2), np.issubdtype(arr.dtype, np.integer)


def _labels(p: np.ndarray, z, r: float, R: float, lattice: bool) -> np.ndarray:
    """+1 at the outer circle or beyond, -1 at the inner circle or within, 0 between."""
    z = np.asarray(z, dtype=p.dtype if lattice else float)
    d = p - z
    d2 = d[:, 0] ** 2 + d[:, 1] ** 2
    if lattice:
        inner = d2 < r * r
        for step in NEIGHBOURS:
            e = d + step
            inner |= e[:, 0] ** 2 + e[:, 1] ** 2 < r * r
        outer = d2 >= R * R
    else:
        inner = d2 <= r * r
        outer = d2 >= R * R
    return outer.astype(np.int8) - inner.astype(np.int8)


def _count_runs(lab: np.ndarray, direction: str) -> int:
    lab = lab[lab != 0]
    if lab.size == 0:
        return 0
    runs = lab[np.r_[True, lab[1:] != lab[:-1]]]
    if direction == OUTER_TO_INNER:
        # the start counts as being outside, so every arrival at the inner circle counts
        return int(np.count_nonzero(runs == -1))
    if direction == ROUND_TRIP:
        return int(np.count_nonzero((runs[1:] == 1) & (runs[:-1] == -1)))
    raise PreconditionError(f"unknown direction {direction!r}")


def excursion_count(path, center, r: float, R: float, direction: str = OUTER_TO_INNER, until: int | None = None) -> int:
    """Count annulus crossings between the circles of radius ``r < R`` about ``center``.

    ``OUTER_TO_INNER`` counts arrivals at the inner circle, each after being at
    the outer circle (or at the start).  ``ROUND_TRIP`` counts completed
    inner-to-outer traversals.  Lattice walks use the lattice boundary
    ``dD_z(r)`` for the inner circle and exit from ``D_z(R)`` for the outer one.
    Only samples ``0..until`` are used when ``until`` is given.
    """
    if not 0 < r < R:
        raise PreconditionError(f"need 0 < r < R, got r={r}, R={R}")
    p, lattice = _positions(path)
    if until is not None:
        p = p[: until + 1]
    return _count_runs(_labels(p, center, r, R, lattice), direction)


# ---------------------------------------------------------------------------
# scale schedules

FACTORIAL, LATTICE, GEOMETRIC = "factorial", "lattice", "geometric"


@dataclass(frozen=True)
class ScaleEntry:
    k: int
    j: int
    inner: float
    outer: float
    target: float | None


@dataclass(frozen=True)
class ScaleSchedule:
    kind: str
    entries: tuple[ScaleEntry, ...]
    params: dict

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i) -> ScaleEntry:
        return self.entries[i]

    def by_k(self, k: int) -> ScaleEntry:
        for e in self.entries:
            if e.k == k:
                return e
        raise KeyError(k)


def factorial_radius(eps1: float, k: int) -> float:
    """``eps_1 (k!)^(-3)``."""
    return eps1 / float(math.factorial(k)) ** 3


def excursion_target(a: float, k: int) -> float:
    """``3 a k^2 log k``."""
    return 3.0 * a * k * k * math.log(k)


def lattice_radii(n: int, delta: float, K: float) -> tuple[int, float, float]:
    """``(k(n), r_n, R_n)`` for the lattice annuli."""
    kn = int(math.floor((0.5 - delta) * math.log(n)))
    base = math.sqrt(n / (2.0 * K))
    r_n = (1.0 + 3.0 * delta) * math.exp(-kn) * base
    R_n = (1.0 - 3.0 * delta) * math.exp(-kn + 1) * base
    return kn, r_n, R_n


def make_schedule(kind: str, **params) -> ScaleSchedule:
    """Build one of the radius schedules used by the excursion detectors.

    ``factorial``: ``eps1`` in (0,1), ``a > 0``, ``n >= 2``; entries k = 2..n with
    inner ``eps_k``, outer ``eps_{k-1}`` and target ``n_k = 3 a k^2 log k``.

    ``geometric``: ``eps1``, level ``k >= 2``; entries ``eps_{k,j} = eps_k e^{-j/k}``
    for ``j = 0..floor(3 k log(k+1))``.

    ``lattice``: ``n >= 2``, ``delta`` in (0, 1/22), ``K > 0``, optional ``a``
    (default 1); one entry ``(k(n), r_n, R_n, a k(n)^2)``.
    """
    if kind == FACTORIAL:
        eps1, a, n = float(params["eps1"]), float(params["a"]), int(params["n"])
        if not (0 < eps1 < 1 and a > 0 and n >= 2):
            raise PreconditionError("factorial schedule needs 0 < eps1 < 1, a > 0, n >= 2")
        entries = tuple(
            ScaleEntry(k, 0, factorial_radius(eps1, k), factorial_radius(eps1, k - 1), excursion_target(a, k))
            for k in range(2, n + 1)
        )
        return ScaleSchedule(kind, entries, dict(eps1=eps1, a=a, n=n))
    if kind == GEOMETRIC:
        eps1, k = float(params["eps1"]), int(params["k"])
        if not (0 < eps1 < 1 and k >= 2):
            raise PreconditionError("geometric schedule needs 0 < eps1 < 1 and k >= 2")
        ek = factorial_radius(eps1, k)
        J = int(math.floor(3 * k * math.log(k + 1)))
        radii = [ek * math.exp(-j / k) for j in range(J + 1)]
        outer = [factorial_radius(eps1, k - 1)] + radii[:-1]
        entries = tuple(ScaleEntry(k, j, radii[j], outer[j], None) for j in range(J + 1))
        return ScaleSchedule(kind, entries, dict(eps1=eps1, k=k))
    if kind == LATTICE:
        n, delta, K = int(params["n"]), float(params["delta"]), float(params["K"])
        a = float(params.get("a", 1.0))
        if not (n >= 2 and 0 < delta < 1 / 22 and K > 0 and a > 0):
            raise PreconditionError("lattice schedule needs n >= 2, 0 < delta < 1/22, K > 0, a > 0")
        kn, r_n, R_n = lattice_radii(n, delta, K)
        entries = (ScaleEntry(kn, 0, r_n, R_n, a * kn * kn),)
        return ScaleSchedule(kind, entries, dict(n=n, delta=delta, K=K, a=a))
    raise PreconditionError(f"unknown schedule kind {kind!r}")


# ---------------------------------------------------------------------------
# detectors


@dataclass
class PerfectPointResult:
    perfect: bool
    counts: np.ndarray  # rows k = 2..n, columns (N_k(1/2), N_k(2))
    truncated: bool


def _first_reach(p: np.ndarray, x, rho: float) -> int | None:
    d = p - np.asarray(x, dtype=float)
    out = np.flatnonzero(d[:, 0] ** 2 + d[:, 1] ** 2 >= rho * rho)
    return int(out[0]) if out.size else None


def perfect_point_test(path: PlanarPath, x, n: int, a: float, schedule: ScaleSchedule | None = None, eps1: float = 1 / 8) -> PerfectPointResult:
    """Check ``n_k - k <= N_k(1/2) <= N_k(2) <= n_k + k`` for ``k = 2..n``.

    ``N_k(rho)`` counts outer-to-inner excursions from ``dD(x, eps_{k-1})`` to
    ``dD(x, eps_k)`` before the path first reaches ``dD(x, rho)``.  If the path
    never reaches a circle the whole path is used and ``truncated`` is set.
    """
    if schedule is None:
        schedule = make_schedule(FACTORIAL, eps1=eps1, a=a, n=n)
    if schedule.kind != FACTORIAL:
        raise PreconditionError("perfect points use the factorial schedule")
    if schedule.params["a"] != a or schedule.params["n"] < n:
        raise PreconditionError("schedule was built for different (a, n)")
    if path.kind != INJECTED and schedule.by_k(n).inner < 4.0 * math.sqrt(path.dt):
        raise PreconditionError(f"eps_{n} is finer than 4*sqrt(dt); refine dt")
    p = path.points
    counts = np.zeros((n - 1, 2), dtype=np.int64)
    truncated = False
    for col, rho in enumerate((0.5, 2.0)):
        stop = _first_reach(p, x, rho)
        if stop is None:
            truncated = True
            stop = len(p) - 1
        lab_path = p[: stop + 1]
        for k in range(2, n + 1):
            e = schedule.by_k(k)
            counts[k - 2, col] = _count_runs(_labels(lab_path, x, e.inner, e.outer, False), OUTER_TO_INNER)
    if truncated:
        warnings.warn("path ended before reaching dD(x, rho); counts use the full path", RuntimeWarning, stacklevel=2)
    ok = True
    for k in range(2, n + 1):
        nk = schedule.by_k(k).target
        lo, hi = counts[k - 2]
        ok &= bool(nk - k <= lo <= hi <= nk + k)
    return PerfectPointResult(ok, counts, truncated)


def admissible_test(runX: WalkRun, runX2: WalkRun, z, n: int, delta: float, K: float, a: float = 1.0) -> bool:
    """Both walks complete at least ``(1 - 2 delta) a k(n)^2`` round trips
    between ``dD_z(r_n)`` and ``dD_z(R_n)`` within ``n`` steps."""
    if not (n >= 2 and 0 < delta <= 0.5 and K > 0 and a > 0):
        raise PreconditionError("need n >= 2, 0 < delta <= 1/2, K > 0, a > 0")
    kn, r_n, R_n = lattice_radii(n, delta, K)
    need = (1.0 - 2.0 * delta) * a * kn * kn
    if need <= 0:
        return True
    if not 0 < r_n < R_n:
        raise PreconditionError(f"degenerate annulus r_n={r_n}, R_n={R_n}")
    if n > min(runX.steps, runX2.steps):
        raise PreconditionError("walks are shorter than the step budget n")
    return all(excursion_count(run, z, r_n, R_n, ROUND_TRIP, until=n) >= need for run in (runX, runX2))
