"""Time-discretised planar Brownian motion and isotropic stable paths.

Occupation measures are left-endpoint Riemann sums: every sample carries time
mass ``dt``.  Exit times are detected at the first sample outside the disc, with
no bridge correction, so they carry an O(sqrt(dt)) overshoot bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._binning import CellIndex
from .errors import PreconditionError
from .rng import generator

BM, STABLE, INJECTED = "bm", "stable", "injected"
CHUNK = 1 << 14


@dataclass(frozen=True)
class PlanarPath:
    """Samples ``points[i]`` of a planar path at times ``i * dt``."""

    dt: float
    points: np.ndarray
    kind: str = INJECTED
    beta: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(pts) < 1:
            raise PreconditionError("a path needs at least one sample")
        if not self.dt > 0:
            raise PreconditionError(f"dt must be positive, got {self.dt}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def duration(self) -> float:
        return len(self.points) * self.dt

    def scaled(self, c: float) -> "PlanarPath":
        """Brownian rescaling: positions times ``c``, time step times ``c**2``."""
        return PlanarPath(self.dt * c * c, self.points * c, self.kind, self.beta)

    def rotated(self, angle: float) -> "PlanarPath":
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        return PlanarPath(self.dt, self.points @ rot.T, self.kind, self.beta)


@dataclass(frozen=True)
class ExitRadius:
    r: float


@dataclass(frozen=True)
class FixedTime:
    T: float


def simulate_bm(seed: int, dt: float, stop, start=(0.0, 0.0), max_steps: int = 10**9) -> PlanarPath:
    """Planar Brownian motion with per-coordinate increment variance ``dt``.

    ``stop`` is :class:`FixedTime` (``floor(T/dt) + 1`` samples) or
    :class:`ExitRadius` (ends at the first sample with ``|W| >= r``, overshoot kept).
    """
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    g = generator(seed)
    sd = math.sqrt(dt)
    pos = np.asarray(start, dtype=float)
    if isinstance(stop, FixedTime):
        if not stop.T > 0:
            raise PreconditionError("T must be positive")
        n = int(math.floor(stop.T / dt + 1e-9))
        blocks = [pos[None, :]]
        left = n
        while left > 0:
            z = g.standard_normal((CHUNK, 2))[: min(left, CHUNK)]
            b = np.cumsum(z * sd, axis=0) + pos
            pos = b[-1]
            blocks.append(b)
            left -= len(z)
        return PlanarPath(dt, np.concatenate(blocks), BM)
    if isinstance(stop, ExitRadius):
        if not stop.r > 0:
            raise PreconditionError("exit radius must be positive")
        r2 = stop.r**2
        blocks = [pos[None, :]]
        if pos @ pos >= r2:
            return PlanarPath(dt, blocks[0], BM)
        taken = 0
        while taken < max_steps:
            z = g.standard_normal((CHUNK, 2))
            b = np.cumsum(z * sd, axis=0) + pos
            out = np.flatnonzero(b[:, 0] ** 2 + b[:, 1] ** 2 >= r2)
            if out.size:
                blocks.append(b[: out[0] + 1])
                return PlanarPath(dt, np.concatenate(blocks), BM)
            blocks.append(b)
            pos = b[-1]
            taken += CHUNK
        raise PreconditionError(f"path did not exit D(0,{stop.r}) within {max_steps} steps")
    raise PreconditionError(f"unknown stopping rule {stop!r}")


def exit_index(path: PlanarPath, r: float) -> int | None:
    """Index of the first sample with ``|W| >= r`` (None if the path stays inside)."""
    p = path.points
    out = np.flatnonzero(p[:, 0] ** 2 + p[:, 1] ** 2 >= r * r)
    return int(out[0]) if out.size else None


# ---------------------------------------------------------------------------
# stable processes


def positive_stable(rng: np.random.Generator, alpha: float, size) -> np.ndarray:
    """One-sided stable variables with Laplace transform ``exp(-s**alpha)``, 0 < alpha < 1.

    Kanter's representation, evaluated in logs to avoid overflow for small alpha.
    """
    u = rng.uniform(0.0, math.pi, size)
    e = rng.standard_exponential(size)
    log_s = (
        np.log(np.sin(alpha * u))
        - np.log(np.sin(u)) / alpha
        + (1.0 - alpha) / alpha * (np.log(np.sin((1.0 - alpha) * u)) - np.log(e))
    )
    return np.exp(log_s)


def simulate_stable(seed: int, beta: float, dt: float, T: float, start=(0.0, 0.0)) -> PlanarPath:
    """Isotropic ``beta``-stable path with characteristic exponent ``|xi|**beta``.

    Each step is ``sqrt(2 S) * N(0, I)`` with ``S`` a ``beta/2``-stable subordinator
    increment over ``dt``; then ``E exp(i xi . X_t) = exp(-t |xi|**beta)``, whose
    0-potential density is ``c_beta |x|**(beta - 2)``.  At ``beta = 2`` this is
    Brownian motion run at twice the standard speed.
    """
    if not 0 < beta < 2:
        raise PreconditionError(f"beta must lie in (0, 2), got {beta}")
    if not (dt > 0 and T > 0):
        raise PreconditionError("dt and T must be positive")
    alpha = beta / 2.0
    g = generator(seed)
    n = int(math.floor(T / dt + 1e-9))
    pos = np.asarray(start, dtype=float)
    blocks = [pos[None, :]]
    left = n
    scale = dt ** (1.0 / alpha)
    while left > 0:
        m = min(left, CHUNK)
        s = positive_stable(g, alpha, CHUNK)[:m] * scale
        z = g.standard_normal((CHUNK, 2))[:m]
        b = np.cumsum(z * np.sqrt(2.0 * s)[:, None], axis=0) + pos
        pos = b[-1]
        blocks.append(b)
        left -= m
    return PlanarPath(dt, np.concatenate(blocks), STABLE, beta)


# ---------------------------------------------------------------------------
# shapes


def _point_in_polygon(x: np.ndarray, y: np.ndarray, verts: np.ndarray) -> np.ndarray:
    inside = np.zeros(x.shape, dtype=bool)
    n = len(verts)
    for k in range(n):
        x1, y1 = verts[k]
        x2, y2 = verts[(k + 1) % n]
        crosses = (y1 > y) != (y2 > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (x < xint)
    return inside


@dataclass(frozen=True)
class KSet:
    """A set ``K`` inside the unit disc, held as a raster over ``[-1, 1]^2``.

    ``mask[i, j]`` covers ``x`` in ``[-1 + j h, -1 + (j+1) h)`` and ``y`` in
    ``[-1 + i h, -1 + (i+1) h)``.  A cell is in ``K`` iff its center is.
    Membership also requires ``|u| < 1`` so that ``K`` is contained in the open
    unit disc exactly, not just up to a raster cell.
    """

    mask: np.ndarray
    h: float
    name: str = "K"
    area: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        side = int(round(2.0 / self.h))
        if m.shape != (side, side):
            raise PreconditionError(f"raster must be {side}x{side} for h={self.h}, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)
        object.__setattr__(self, "area", float(m.sum()) * self.h * self.h)
        if self.area <= 0:
            raise PreconditionError("K must have positive area")

    @staticmethod
    def _centers(h: float) -> np.ndarray:
        side = int(round(2.0 / h))
        return -1.0 + (np.arange(side) + 0.5) * h

    @classmethod
    def from_predicate(cls, pred, h: float = 1 / 512, name: str = "K") -> "KSet":
        c = cls._centers(h)
        X, Y = np.meshgrid(c, c)
        return cls(pred(X, Y) & (X**2 + Y**2 < 1.0), h, name)

    @classmethod
    def disc(cls, h: float = 1 / 512) -> "KSet":
        return cls.from_predicate(lambda x, y: np.ones_like(x, dtype=bool), h, "disc")

    @classmethod
    def half_disc(cls, h: float = 1 / 512) -> "KSet":
        return cls.from_predicate(lambda x, y: y > 0, h, "half-disc")

    @classmethod
    def from_polygon(cls, vertices, h: float = 1 / 512, name: str = "polygon") -> "KSet":
        v = np.asarray(vertices, dtype=float).reshape(-1, 2)
        if len(v) < 3:
            raise PreconditionError("a polygon needs at least 3 vertices")
        return cls.from_predicate(lambda x, y: _point_in_polygon(x, y, v), h, name)

    def contains(self, u: np.ndarray) -> np.ndarray:
        """Membership of points ``u`` given in the unit coordinates of ``K``."""
        u = np.asarray(u, dtype=float).reshape(-1, 2)
        side = self.mask.shape[0]
        j = np.floor((u[:, 0] + 1.0) / self.h).astype(np.int64)
        i = np.floor((u[:, 1] + 1.0) / self.h).astype(np.int64)
        ok = (u[:, 0] ** 2 + u[:, 1] ** 2 < 1.0) & (i >= 0) & (i < side) & (j >= 0) & (j < side)
        out = np.zeros(len(u), dtype=bool)
        out[ok] = self.mask[i[ok], j[ok]]
        return out

    # text format: "polygon n" + n vertex lines, or "raster h" + row-major 0/1 rows
    @classmethod
    def read(cls, path, h: float = 1 / 512) -> "KSet":
        return cls.parse(Path(path).read_text(), h=h, name=Path(path).stem)

    @classmethod
    def parse(cls, text: str, h: float = 1 / 512, name: str = "K") -> "KSet":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        if not lines:
            raise PreconditionError("empty K-set description")
        head = lines[0].split()
        if head[0] == "polygon" and len(head) == 2:
            n = int(head[1])
            if len(lines) != n + 1:
                raise PreconditionError(f"expected {n} vertex lines, got {len(lines) - 1}")
            verts = [tuple(map(float, ln.split())) for ln in lines[1:]]
            return cls.from_polygon(verts, h, name)
        if head[0] == "raster" and len(head) == 2:
            hr = float(head[1])
            rows = [[int(ch) for ch in ln.replace(" ", "")] for ln in lines[1:]]
            mask = np.array(rows, dtype=np.int8) == 1
            c = cls._centers(hr)
            X, Y = np.meshgrid(c, c)
            return cls(mask & (X**2 + Y**2 < 1.0), hr, name)
        raise PreconditionError(f"unrecognised header line {lines[0]!r}")

    def to_text(self) -> str:
        rows = ["".join("1" if v else "0" for v in row) for row in self.mask]
        return f"raster {self.h!r}\n" + "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# occupation


@dataclass(frozen=True)
class OccupationQuery:
    center: tuple[float, float]
    eps: float
    kset: KSet | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise PreconditionError("eps must be positive")


def _in_region(points: np.ndarray, center, eps: float, kset: KSet | None) -> np.ndarray:
    d = points - np.asarray(center, dtype=float)
    disc = d[:, 0] ** 2 + d[:, 1] ** 2 < eps * eps
    if kset is None:
        return disc
    return disc & kset.contains(d / eps)


def occupation_measure(path: PlanarPath, query: OccupationQuery, horizon: int | None = None) -> float:
    """``dt * #{i <= horizon : W_i in region}`` for a disc ``D(x, eps)`` or ``x + eps K``."""
    n = len(path) - 1 if horizon is None else int(horizon)
    if not 0 <= n < len(path):
        raise PreconditionError(f"horizon {n} outside the path (length {len(path)})")
    inside = _in_region(path.points[: n + 1], query.center, query.eps, query.kset)
    return np.count_nonzero(inside) * path.dt


@dataclass
class OccupationProfile:
    centers: np.ndarray
    eps: np.ndarray
    occupation: np.ndarray  # (n_centers, n_eps)
    ratio: np.ndarray
    sup: np.ndarray
    kset: KSet | None = None


def _grid_pitch(centers: np.ndarray) -> float:
    steps = []
    for col in centers.T:
        u = np.unique(col)
        if len(u) > 1:
            steps.append(np.diff(u).min())
    return float(min(steps)) if steps else 0.0


def occupation_profile(
    path: PlanarPath,
    centers,
    eps_list: Sequence[float],
    kset: KSet | None = None,
    pitch: float | None = None,
) -> OccupationProfile:
    """Normalised occupation ``mu(D(x,eps)) / (eps^2 log^2(1/eps))`` on a grid of centers.

    With ``kset`` the numerator is ``pi * mu(x + eps K) / |K|``, so both variants
    share the limiting supremum 2.
    """
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    eps = np.asarray(eps_list, dtype=float)
    pitch = _grid_pitch(centers) if pitch is None else float(pitch)
    floor = max(2.0 * math.sqrt(path.dt), pitch)
    bad = eps[~(eps > floor) | ~(eps < 1.0)]
    if bad.size:
        raise PreconditionError(
            f"eps values {bad.tolist()} violate the resolution guard eps > {floor:.3g} (and eps < 1)"
        )
    occ = np.zeros((len(centers), len(eps)))
    for k, e in enumerate(eps):
        idx = CellIndex(path.points, e)
        i, j = idx.pairs(centers)
        if kset is not None:
            keep = kset.contains((path.points[j] - centers[i]) / e)
            i = i[keep]
        occ[:, k] = np.bincount(i, minlength=len(centers)) * path.dt
    norm = eps**2 * np.log(1.0 / eps) ** 2
    ratio = occ / norm
    if kset is not None:
        ratio = ratio * math.pi / kset.area
    return OccupationProfile(centers, eps, occ, ratio, ratio.max(axis=0), kset)
