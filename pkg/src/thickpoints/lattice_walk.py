"""Simple random walk on Z^2: paths, local times, lattice discs, Green's functions.

Local-time fields are stored as a sorted array of packed coordinates with a
parallel array of visit counts.  Packing puts ``x`` in the high 32 bits and
``y`` in the low 32 bits of an ``int64``.  Keys are unique per point, so set
operations between fields reduce to operations on sorted integer arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapacityError, PreconditionError
from .rng import generator, mix

# unit steps +e1, -e1, +e2, -e2
STEP_X = np.array([1, -1, 0, 0], dtype=np.int64)
STEP_Y = np.array([0, 0, 1, -1], dtype=np.int64)
NEIGHBOURS = np.stack([STEP_X, STEP_Y], axis=1)

# directions are drawn in blocks of this size regardless of how the path is
# consumed, which keeps streamed and materialised paths bit-identical
CHUNK = 1 << 16


class LatticePoint(NamedTuple):
    x: int
    y: int


ORIGIN = LatticePoint(0, 0)


def pack(xy: np.ndarray) -> np.ndarray:
    """Pack an ``(m, 2)`` integer array into ``int64`` keys."""
    xy = np.asarray(xy, dtype=np.int64)
    return (xy[..., 0] << 32) | (xy[..., 1] & 0xFFFFFFFF)


def unpack(keys: np.ndarray) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    x = keys >> 32
    y = ((keys & 0xFFFFFFFF) ^ 0x80000000) - 0x80000000
    return np.stack([x, y], axis=-1)


# ---------------------------------------------------------------------------
# discs


@dataclass(frozen=True)
class LatticeDisc:
    """Lattice points strictly inside the Euclidean disc of ``radius`` about ``center``."""

    center: LatticePoint
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise PreconditionError(f"radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", LatticePoint(*map(int, self.center)))

    def contains(self, points) -> np.ndarray | bool:
        p = np.asarray(points, dtype=np.int64)
        d = p - np.asarray(self.center, dtype=np.int64)
        inside = (d[..., 0] ** 2 + d[..., 1] ** 2) < self.radius**2
        return bool(inside) if inside.ndim == 0 else inside

    def on_boundary(self, points) -> np.ndarray | bool:
        """Membership in ``{z not in D : |z - y| = 1 for some y in D}``."""
        p = np.asarray(points, dtype=np.int64)
        hit = np.zeros(p.shape[:-1], dtype=bool)
        for step in NEIGHBOURS:
            hit |= self.contains(p + step)
        res = hit & ~self.contains(p)
        return bool(res) if res.ndim == 0 else res

    def interior(self) -> np.ndarray:
        """All lattice points of the disc, ``(N, 2)``, sorted by packed key."""
        m = int(math.ceil(self.radius))
        ax = np.arange(-m, m + 1, dtype=np.int64)
        gx, gy = np.meshgrid(ax, ax, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
        pts = pts[(pts[:, 0] ** 2 + pts[:, 1] ** 2) < self.radius**2]
        return pts + np.asarray(self.center, dtype=np.int64)

    def boundary(self) -> np.ndarray:
        inner = self.interior()
        cand = np.unique(pack((inner[:, None, :] + NEIGHBOURS[None]).reshape(-1, 2)))
        cand = unpack(cand)
        return cand[~self.contains(cand)]


# ---------------------------------------------------------------------------
# walks


@dataclass(frozen=True)
class WalkRun:
    """A reproducible simple random walk, or an injected deterministic path.

    Positions are produced lazily by :meth:`chunks`; :meth:`path` materialises
    them.  Two runs with equal ``(seed, steps, start)`` yield identical streams.
    """

    seed: int | None
    steps: int
    start: LatticePoint = ORIGIN
    injected: np.ndarray | None = field(default=None, repr=False, compare=False)

    def chunks(self) -> Iterator[np.ndarray]:
        """Yield consecutive blocks of positions covering indices ``0..steps``."""
        if self.injected is not None:
            yield self.injected
            return
        g = generator(self.seed)
        pos = np.asarray(self.start, dtype=np.int64)
        yield pos[None, :].copy()
        left = self.steps
        while left > 0:
            d = g.integers(0, 4, size=CHUNK, dtype=np.uint8)[: min(left, CHUNK)]
            block = np.empty((d.size, 2), dtype=np.int64)
            np.cumsum(STEP_X[d], out=block[:, 0])
            np.cumsum(STEP_Y[d], out=block[:, 1])
            block += pos
            pos = block[-1]
            left -= d.size
            yield block

    def path(self) -> np.ndarray:
        """All ``steps + 1`` positions as an ``(steps + 1, 2)`` int64 array."""
        if self.injected is not None:
            return self.injected
        return np.concatenate(list(self.chunks()))

    def keys(self) -> np.ndarray:
        """Packed positions, streamed chunk by chunk to avoid a full ``(n, 2)`` copy."""
        out = np.empty(self.steps + 1, dtype=np.int64)
        i = 0
        for block in self.chunks():
            out[i : i + len(block)] = pack(block)
            i += len(block)
        return out

    @classmethod
    def from_positions(cls, positions) -> "WalkRun":
        """Wrap a hand-made nearest-neighbour path (used for tests and demos)."""
        p = np.asarray(positions, dtype=np.int64).reshape(-1, 2)
        if len(p) == 0:
            raise PreconditionError("a path needs at least one position")
        steps = np.abs(np.diff(p, axis=0)).sum(axis=1)
        if np.any(steps != 1):
            raise PreconditionError("consecutive positions must differ by one unit step")
        p.setflags(write=False)
        return cls(seed=None, steps=len(p) - 1, start=LatticePoint(*map(int, p[0])), injected=p)


def simulate_srw(seed: int, steps: int, start=ORIGIN) -> WalkRun:
    """Simple random walk of ``steps`` unit steps started at ``start``."""
    if steps < 0:
        raise PreconditionError(f"steps must be >= 0, got {steps}")
    return WalkRun(seed=int(seed), steps=int(steps), start=LatticePoint(*map(int, start)))


# ---------------------------------------------------------------------------
# local times


@dataclass(frozen=True)
class LocalTimeField:
    """Sparse map from lattice points to visit counts over steps ``0..total_steps``."""

    keys: np.ndarray
    counts: np.ndarray
    total_steps: int

    def __len__(self):
        return len(self.keys)

    def __getitem__(self, point) -> int:
        k = pack(np.asarray(point))
        i = np.searchsorted(self.keys, k)
        if i < len(self.keys) and self.keys[i] == k:
            return int(self.counts[i])
        return 0

    def __contains__(self, point) -> bool:
        return self[point] > 0

    def points(self) -> np.ndarray:
        return unpack(self.keys)

    def as_dict(self) -> dict[LatticePoint, int]:
        return {LatticePoint(int(x), int(y)): int(c) for (x, y), c in zip(self.points(), self.counts)}

    def max(self) -> int:
        return int(self.counts.max()) if len(self.counts) else 0

    @classmethod
    def from_keys(cls, keys: np.ndarray, total_steps: int) -> "LocalTimeField":
        k, c = np.unique(keys, return_counts=True)
        return cls(keys=k, counts=c.astype(np.int64), total_steps=int(total_steps))


def local_time_field(run: WalkRun, n: int | None = None) -> LocalTimeField:
    """Visit counts ``L_n(x) = #{0 <= i <= n : X_i = x}``."""
    n = run.steps if n is None else int(n)
    if n < 0 or n > run.steps:
        raise PreconditionError(f"horizon n={n} outside [0, {run.steps}]")
    keys = run.keys()[: n + 1]
    return LocalTimeField.from_keys(keys, n)


def local_time_prefixes(run: WalkRun, horizons) -> list[LocalTimeField]:
    """Local-time fields at several horizons from a single stable sort of the path.

    Equivalent to ``[local_time_field(run, n) for n in horizons]`` but sorts the
    packed path once; each horizon then costs one masked segment reduction.
    """
    horizons = [int(n) for n in horizons]
    for n in horizons:
        if n < 0 or n > run.steps:
            raise PreconditionError(f"horizon n={n} outside [0, {run.steps}]")
    top = max(horizons)
    keys = run.keys()[: top + 1]
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    starts = np.flatnonzero(np.r_[True, sk[1:] != sk[:-1]])
    ukeys = sk[starts]
    del sk
    out = []
    for n in horizons:
        hit = (order <= n).astype(np.int64)
        c = np.add.reduceat(hit, starts)
        keep = c > 0
        out.append(LocalTimeField(keys=ukeys[keep], counts=c[keep], total_steps=n))
    return out


def visit_ranks(run: WalkRun) -> np.ndarray:
    """For each index ``i`` the value ``L_i(X_i)``, i.e. which visit to ``X_i`` step ``i`` is.

    ``max(visit_ranks[:n+1]) == local_time_field(run, n).max()`` and the number
    of points with ``L_n >= m`` equals ``count_nonzero(visit_ranks[:n+1] == m)``.
    """
    keys = run.keys()
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    del keys
    new = np.r_[True, sk[1:] != sk[:-1]]
    del sk
    group_start = np.maximum.accumulate(np.where(new, np.arange(len(new)), 0))
    rank = np.empty(len(order), dtype=np.int64)
    rank[order] = np.arange(len(order)) - group_start + 1
    return rank


# ---------------------------------------------------------------------------
# exit problems


class ExitRecord(NamedTuple):
    exit_step: int
    visits_to_origin: int
    exit_point: LatticePoint


def _exit_chunk(R: float) -> int:
    return int(min(max(256, 2 ** math.ceil(math.log2(max(R * R, 1.0)))), CHUNK))


def run_until_exit(seed: int, R: float, start=ORIGIN) -> ExitRecord:
    """Run a walk from ``start`` until it first leaves ``D_0(R)``.

    ``visits_to_origin`` counts indices strictly before the exit index,
    including index 0 when the walk starts at the origin.
    """
    start = LatticePoint(*map(int, start))
    if not start.x**2 + start.y**2 < R * R:
        raise PreconditionError(f"start {tuple(start)} is not inside D_0({R})")
    g = generator(seed)
    chunk = _exit_chunk(R)
    R2 = R * R
    x, y = start
    t = 0
    visits = int(x == 0 and y == 0)
    while True:
        d = g.integers(0, 4, size=chunk, dtype=np.uint8)
        xs = x + np.cumsum(STEP_X[d])
        ys = y + np.cumsum(STEP_Y[d])
        r2 = xs * xs + ys * ys
        out = np.flatnonzero(r2 >= R2)
        if out.size:
            e = out[0]
            visits += int(np.count_nonzero(r2[:e] == 0))
            return ExitRecord(int(t + e + 1), visits, LatticePoint(int(xs[e]), int(ys[e])))
        visits += int(np.count_nonzero(r2 == 0))
        x, y = int(xs[-1]), int(ys[-1])
        t += chunk


def _hits_origin_first(seed: int, R: float, start: LatticePoint) -> bool:
    g = generator(seed)
    chunk = _exit_chunk(R)
    R2 = R * R
    x, y = start
    while True:
        d = g.integers(0, 4, size=chunk, dtype=np.uint8)
        xs = x + np.cumsum(STEP_X[d])
        ys = y + np.cumsum(STEP_Y[d])
        r2 = xs * xs + ys * ys
        stop = np.flatnonzero((r2 == 0) | (r2 >= R2))
        if stop.size:
            return bool(r2[stop[0]] == 0)
        x, y = int(xs[-1]), int(ys[-1])


def lattice_circle(r: float, R: float) -> np.ndarray:
    """Lattice points of ``D_0(R) \\ {0}`` whose norm is within 1/2 of ``r``, by angle.

    Falls back to the points whose norm is closest to ``r`` when that shell is empty.
    """
    pts = LatticeDisc(ORIGIN, R).interior()
    pts = pts[(pts[:, 0] != 0) | (pts[:, 1] != 0)]
    dist = np.abs(np.hypot(pts[:, 0], pts[:, 1]) - r)
    shell = pts[dist <= 0.5]
    if len(shell) == 0:
        shell = pts[dist == dist.min()]
    ang = np.arctan2(shell[:, 1], shell[:, 0])
    return shell[np.lexsort((shell[:, 1], shell[:, 0], ang))]


def hitting_prob_zero(R: float, r: float, replicas: int, seed: int) -> tuple[float, float]:
    """Monte Carlo ``P^z(T_0 < T_{dD_0(R)})`` averaged over the lattice circle of radius ``r``.

    Replica ``i`` starts at the ``i mod m``-th circle point (ordered by angle)
    and uses seed ``mix(seed, i)``.  Returns ``(estimate, standard_error)``.
    """
    if r < 0 or r >= R:
        raise PreconditionError(f"need 0 <= r < R, got r={r}, R={R}")
    if replicas < 1:
        raise PreconditionError("replicas must be >= 1")
    if r == 0:
        return 1.0, 0.0
    starts = lattice_circle(r, R)
    hits = np.fromiter(
        (_hits_origin_first(mix(seed, i), R, LatticePoint(*starts[i % len(starts)])) for i in range(replicas)),
        dtype=bool,
        count=replicas,
    )
    p = hits.mean()
    se = hits.std(ddof=1) / math.sqrt(replicas) if replicas > 1 else float("nan")
    return float(p), float(se)


# ---------------------------------------------------------------------------
# Green's functions


class LatticeGreen:
    """Green's function of the walk killed on leaving ``D_0(R)``.

    ``G(x, y)`` is the expected number of visits to ``y`` before exit for the
    walk started at ``x``.  The Dirichlet operator ``I - P`` restricted to the
    disc is factorised once; columns are solved on demand and cached.  The full
    matrix is only materialised through :meth:`matrix` for small domains.
    """

    DENSE_LIMIT = 5000

    def __init__(self, R: float, max_points: int = 100_000):
        self.R = float(R)
        disc = LatticeDisc(ORIGIN, self.R)
        m = int(math.ceil(self.R))
        approx = math.pi * self.R**2
        if approx > 2 * max_points + 10 * m:
            raise CapacityError(f"D_0({R}) has about {approx:.0f} points, budget is {max_points}")
        self.domain = disc.interior()
        if len(self.domain) > max_points:
            raise CapacityError(f"D_0({R}) has {len(self.domain)} points, budget is {max_points}")
        self._keys = pack(self.domain)
        self._order = np.argsort(self._keys)
        self._sorted = self._keys[self._order]
        N = len(self.domain)
        rows, cols = [], []
        for step in NEIGHBOURS:
            j = self.index_of(self.domain + step)
            ok = j >= 0
            rows.append(np.flatnonzero(ok))
            cols.append(j[ok])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        P = sp.csc_matrix((np.full(len(rows), 0.25), (rows, cols)), shape=(N, N))
        self.transition = P
        self.operator = (sp.identity(N, format="csc") - P).tocsc()
        self._lu = spla.splu(self.operator)
        self._columns: dict[int, np.ndarray] = {}

    def __len__(self):
        return len(self.domain)

    def index_of(self, points) -> np.ndarray:
        """Row index of each point in :attr:`domain`, or -1 for points outside."""
        k = pack(np.asarray(points, dtype=np.int64))
        i = np.searchsorted(self._sorted, k)
        i = np.minimum(i, len(self._sorted) - 1)
        found = self._sorted[i] == k
        return np.where(found, self._order[i], -1)

    def column(self, y) -> np.ndarray:
        """``G(., y)`` over the domain."""
        j = int(self.index_of(np.asarray(y))[()])
        if j < 0:
            raise PreconditionError(f"{tuple(y)} is not inside D_0({self.R})")
        if j not in self._columns:
            e = np.zeros(len(self.domain))
            e[j] = 1.0
            self._columns[j] = self._lu.solve(e)
        return self._columns[j]

    def __call__(self, x, y) -> float:
        i = int(self.index_of(np.asarray(x))[()])
        if i < 0:
            return 0.0
        return float(self.column(y)[i])

    def matrix(self) -> np.ndarray:
        """Dense ``G`` indexed by :attr:`domain` (small domains only)."""
        N = len(self.domain)
        if N > self.DENSE_LIMIT:
            raise CapacityError(f"dense Green matrix of size {N} exceeds {self.DENSE_LIMIT}")
        return self._lu.solve(np.eye(N))

    def residual(self, y) -> np.ndarray:
        """Entrywise residual of ``(I - P) G(., y) = e_y``."""
        j = int(self.index_of(np.asarray(y))[()])
        r = self.operator @ self.column(y)
        r[j] -= 1.0
        return r

    @cached_property
    def origin_value(self) -> float:
        return self(ORIGIN, ORIGIN)


def lattice_green_exact(R: float, max_points: int = 100_000) -> LatticeGreen:
    """Exact Dirichlet Green's function on ``D_0(R)`` via a sparse LU factorisation."""
    return LatticeGreen(R, max_points=max_points)


# ---------------------------------------------------------------------------
# moments of the visit count at the origin


def kac_moment_lattice(R: float, k: int) -> float:
    """``k! * G_R(0,0)^k``, the moment formula as displayed for the lattice walk."""
    if k not in (1, 2):
        raise PreconditionError(f"k must be 1 or 2, got {k}")
    G = lattice_green_exact(R).origin_value
    return math.factorial(k) * G**k


def _eulerian(k: int) -> list[int]:
    row = [1]
    for n in range(1, k + 1):
        row = [(i + 1) * (row[i] if i < len(row) else 0) + (n - i) * (row[i - 1] if i >= 1 else 0) for i in range(n)]
    return row


def geometric_visit_moment(G: float, k: int) -> float:
    """``E[V^k]`` for ``V`` geometric on ``{1, 2, ...}`` with mean ``G``.

    This is the exact law of the number of visits to the origin before exit,
    started from the origin: ``P(V >= j + 1 | V >= j) = 1 - 1/G``.  For k = 2 it
    gives ``2 G^2 - G``.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if G < 1:
        raise PreconditionError("mean of a geometric law on {1, 2, ...} is at least 1")
    q = 1.0 - 1.0 / G
    poly = sum(c * q**i for i, c in enumerate(_eulerian(k)))
    return poly * G**k
