"""Continuum kernels: the disc Green's function, stable potentials and their operators.

Singular self-interactions of a quadrature cell are replaced by the average of
the kernel over the disc of equal area, radius ``h_eq = h / sqrt(pi)`` for a
square cell of side ``h``:

* ``log(1/|y|)`` averages to ``log(1/h_eq) + 1/2``;
* ``|y|**(beta - 2)`` averages to ``(2/beta) h_eq**(beta - 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma

from .errors import ConvergenceError, DomainError, PreconditionError, SingularityError
from .rng import generator


def _as_complex(p) -> np.ndarray:
    a = np.asarray(p)
    if np.iscomplexobj(a):
        return a
    a = a.astype(float)
    return a[..., 0] + 1j * a[..., 1]


# ---------------------------------------------------------------------------
# Green's function of the disc


def green_disc_values(r: float, x, y) -> np.ndarray:
    """``(1/pi) log(|r^2 - x conj(y)| / (r |x - y|))`` without argument checks."""
    zx, zy = _as_complex(x), _as_complex(y)
    return np.log(np.abs(r * r - zx * np.conj(zy)) / (r * np.abs(zx - zy))) / math.pi


def green_disc(r: float, x, y):
    """Green's function of planar Brownian motion killed on leaving ``D(0, r)``.

    Points may be complex numbers or ``(..., 2)`` arrays.  Raises
    :class:`SingularityError` when ``x == y`` and :class:`DomainError` for points
    outside the open disc.
    """
    if not r > 0:
        raise DomainError("radius must be positive")
    zx, zy = _as_complex(x), _as_complex(y)
    if np.any(np.abs(zx) >= r) or np.any(np.abs(zy) >= r):
        raise DomainError(f"points must lie in the open disc of radius {r}")
    if np.any(zx == zy):
        raise SingularityError("Green's function is singular on the diagonal")
    out = green_disc_values(r, zx, zy)
    return float(out) if np.ndim(out) == 0 else out


def green_self_average(r: float, y, h: float) -> np.ndarray:
    """Average of ``g_r(y, .)`` over the equal-area disc of a cell of side ``h`` at ``y``."""
    zy = _as_complex(y)
    heq = h / math.sqrt(math.pi)
    regular = np.log((r * r - np.abs(zy) ** 2) / r)
    return (math.log(1.0 / heq) + 0.5 + regular) / math.pi


# ---------------------------------------------------------------------------
# stable potential


def c_beta(beta: float) -> float:
    """``2^-beta pi^-1 Gamma((2 - beta)/2) / Gamma(beta/2)``."""
    if not 0 < beta < 2:
        raise DomainError(f"beta must lie in (0, 2), got {beta}")
    return 2.0**-beta / math.pi * gamma((2.0 - beta) / 2.0) / gamma(beta / 2.0)


def stable_potential(beta: float, x):
    """0-potential density ``c_beta |x|^(beta - 2)`` of the isotropic stable process."""
    cb = c_beta(beta)
    rad = np.abs(_as_complex(x))
    if np.any(rad == 0):
        raise SingularityError("stable potential is singular at 0")
    out = cb * rad ** (beta - 2.0)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Nystrom discretisation of the potential operator on the unit disc


class NystromOperator:
    """Matrix of ``f -> int_{D(0,1)} u0(x - y) f(y) dy`` on square cells of side ``h``.

    Cells belong to the disc iff their centers do, each with weight ``h^2``.
    Off-diagonal entries are ``u0(x_i - x_j) h^2``; the diagonal is the
    equal-area cell average ``c_beta (2/beta) h_eq^(beta-2) h^2``.  Because the
    entries depend only on the grid offset, products are computed by FFT
    convolution and the dense matrix is never needed.
    """

    def __init__(self, beta: float, h: float):
        self.beta = float(beta)
        self.h = float(h)
        self.cb = c_beta(beta)
        side = int(round(2.0 / h))
        if abs(side * h - 2.0) > 1e-9:
            raise PreconditionError("h must divide 2")
        self.side = side
        c = -1.0 + (np.arange(side) + 0.5) * h
        X, Y = np.meshgrid(c, c, indexing="ij")
        self.mask = X**2 + Y**2 < 1.0
        self.centers = np.stack([X[self.mask], Y[self.mask]], axis=1)
        if len(self.centers) < 100:
            raise PreconditionError(f"only {len(self.centers)} cells inside the disc; need at least 100")
        heq = h / math.sqrt(math.pi)
        self.diagonal = self.cb * (2.0 / self.beta) * heq ** (self.beta - 2.0) * h * h
        off = np.arange(-(side - 1), side) * h
        DX, DY = np.meshgrid(off, off, indexing="ij")
        rad = np.hypot(DX, DY)
        rad[side - 1, side - 1] = 1.0
        kern = self.cb * rad ** (self.beta - 2.0) * h * h
        kern[side - 1, side - 1] = self.diagonal
        self.kernel = kern
        self._fft_shape = (2 * side, 2 * side)
        self._kernel_hat = np.fft.rfft2(kern, s=self._fft_shape)

    def __len__(self):
        return len(self.centers)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        grid = np.zeros((self.side, self.side))
        grid[self.mask] = v
        full = np.fft.irfft2(np.fft.rfft2(grid, s=self._fft_shape) * self._kernel_hat, s=self._fft_shape)
        s = self.side
        return full[s - 1 : 2 * s - 1, s - 1 : 2 * s - 1][self.mask]

    def block(self, rows: slice, cols: slice) -> np.ndarray:
        """Explicit matrix entries ``A[rows, cols]``."""
        ri = np.arange(len(self.centers))[rows]
        ci = np.arange(len(self.centers))[cols]
        d = self.centers[ri, None, :] - self.centers[None, ci, :]
        rad = np.hypot(d[..., 0], d[..., 1])
        same = ri[:, None] == ci[None, :]
        rad[same] = 1.0
        A = self.cb * rad ** (self.beta - 2.0) * self.h * self.h
        A[same] = self.diagonal
        return A

    def dense(self, limit: int = 8000) -> np.ndarray:
        n = len(self.centers)
        if n > limit:
            raise PreconditionError(f"{n} cells exceed the dense limit {limit}")
        return self.block(slice(0, n), slice(0, n))

    def symmetry_defect(self, block: int = 512) -> float:
        """``max |A_ij - A_ji|`` over the explicit matrix, assembled block by block."""
        n = len(self.centers)
        worst = 0.0
        for s in range(0, n, block):
            e = min(n, s + block)
            for t in range(0, s + 1, block):
                u = min(n, t + block)
                upper = self.block(slice(s, e), slice(t, u))
                lower = self.block(slice(t, u), slice(s, e))
                worst = max(worst, float(np.abs(upper - lower.T).max()))
        return worst


@dataclass
class PowerIterationResult:
    value: float
    iterations: int
    residual: float
    rayleigh: np.ndarray
    vector: np.ndarray


def power_iteration(matvec, n: int, tol: float = 1e-10, max_iter: int = 100_000) -> PowerIterationResult:
    """Largest eigenvalue of a symmetric positive operator from the all-ones start.

    Stops when successive Rayleigh quotients differ by less than ``tol``.
    """
    v = np.ones(n) / math.sqrt(n)
    w = matvec(v)
    lam = float(v @ w)
    history = [lam]
    for it in range(1, max_iter + 1):
        v = w / np.linalg.norm(w)
        w = matvec(v)
        new = float(v @ w)
        history.append(new)
        if abs(new - lam) < tol:
            res = float(np.linalg.norm(w - new * v))
            return PowerIterationResult(new, it, res, np.array(history), v)
        lam = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations (last change {abs(new - history[-2]):.3g})")


def lambda_beta(beta: float, h: float, tol: float = 1e-10, max_iter: int = 100_000) -> PowerIterationResult:
    """Norm of the stable potential operator on ``L^2(D(0,1))`` at grid side ``h``."""
    if not 0 < beta < 2:
        raise DomainError(f"beta must lie in (0, 2), got {beta}")
    op = NystromOperator(beta, h)
    return power_iteration(op.matvec, len(op), tol=tol, max_iter=max_iter)


# ---------------------------------------------------------------------------
# Kac moments


@dataclass(frozen=True)
class MeasureAtoms:
    """Finite measure ``sum_i w_i delta_{y_i}``; ``cell`` is the side of the
    quadrature cell each atom stands for (needed for moments of order >= 2)."""

    points: np.ndarray
    weights: np.ndarray
    cell: float | None = None

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float).reshape(-1, 2)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(p) != len(w):
            raise PreconditionError("points and weights differ in length")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise PreconditionError("weights must be finite and non-negative")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support_radius(self) -> float:
        return float(np.hypot(self.points[:, 0], self.points[:, 1]).max()) if len(self.points) else 0.0

    @classmethod
    def uniform_disc(cls, r1: float, h: float, mass: float | None = None) -> "MeasureAtoms":
        """Cell measure on the square cells of side ``h`` whose centers lie in ``D(0, r1)``.

        Each cell carries ``h^2`` (Lebesgue) unless a total ``mass`` is given,
        in which case the mass is spread equally over the cells.
        """
        m = int(math.ceil(r1 / h))
        c = (np.arange(-m, m) + 0.5) * h
        X, Y = np.meshgrid(c, c)
        keep = X**2 + Y**2 < r1 * r1
        pts = np.stack([X[keep], Y[keep]], axis=1)
        w = np.full(len(pts), h * h if mass is None else mass / len(pts))
        return cls(pts, w, h)


def _green_apply(vec: np.ndarray, rho: MeasureAtoms, r: float, block: int = 2048) -> np.ndarray:
    """``out_j = sum_i vec_i pi g_r(y_i, y_j) w_j`` with the regularised diagonal."""
    z = _as_complex(rho.points)
    out = np.zeros(len(z))
    diag = green_self_average(r, z, rho.cell)
    for s in range(0, len(z), block):
        zi = z[s : s + block]
        with np.errstate(divide="ignore"):
            G = green_disc_values(r, zi[:, None], z[None, :])
        rows = np.arange(len(zi))
        G[rows, s + rows] = diag[s : s + block]
        out += vec[s : s + block] @ G
    return math.pi * out * rho.weights


def kac_moment_continuum(rho: MeasureAtoms, r: float, x0, k: int) -> float:
    """``k! pi^k`` times the ordered ``k``-fold Green integral against ``rho`` from ``x0``.

    This is the ``k``-th moment of the additive functional with Revuz measure
    ``pi rho`` for Brownian motion started at ``x0`` and killed on leaving ``D(0, r)``.
    """
    if k not in (1, 2, 3):
        raise PreconditionError(f"k must be 1, 2 or 3, got {k}")
    zx0 = complex(*np.asarray(x0, dtype=float))
    if abs(zx0) >= r or rho.support_radius >= r:
        raise DomainError(f"x0 and the support of rho must lie inside D(0,{r})")
    z = _as_complex(rho.points)
    if np.any(z == zx0):
        raise SingularityError("x0 coincides with an atom")
    v = math.pi * green_disc_values(r, zx0, z) * rho.weights
    if k >= 2 and rho.cell is None:
        raise PreconditionError("moments of order >= 2 need the cell size of the atoms")
    for _ in range(k - 1):
        v = _green_apply(v, rho, r)
    return math.factorial(k) * math.fsum(v.tolist())


def kac_correction_budget(r1: float, c: float, gamma1: float, gamma2: float) -> float:
    """``c r1^gamma1 (log(1/r1))^gamma2``: the slack allowed around the leading term."""
    return c * r1**gamma1 * math.log(1.0 / r1) ** gamma2


# ---------------------------------------------------------------------------
# intersection moments


def intersection_first_moment_mc(r: float, r1: float, x0, x0p, samples: int, seed: int) -> tuple[float, float]:
    """Monte Carlo value of ``pi int_{D(0,r1)} g_r(x0, y) g_r(x0', y) dy``.

    This is the mean projected intersection local time of ``D(0, r1)`` for two
    Brownian motions from ``x0`` and ``x0'`` killed on leaving ``D(0, r)``.
    Returns ``(estimate, standard_error)``.
    """
    a, b = _as_complex(x0), _as_complex(x0p)
    if not (0 < r1 <= r / 2):
        raise PreconditionError("need 0 < r1 <= r/2")
    if not (math.isclose(abs(a), r1, rel_tol=1e-9) and math.isclose(abs(b), r1, rel_tol=1e-9)):
        raise PreconditionError("starting points must lie on the circle of radius r1")
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    g = generator(seed)
    rad = r1 * np.sqrt(g.uniform(size=samples))
    ang = g.uniform(0.0, 2 * math.pi, size=samples)
    y = rad * np.exp(1j * ang)
    vals = green_disc_values(r, a, y) * green_disc_values(r, b, y)
    area = math.pi * r1 * r1
    est = math.pi * area * float(vals.mean())
    se = math.pi * area * float(vals.std(ddof=1)) / math.sqrt(samples) if samples > 1 else float("nan")
    return est, se


def intersection_first_moment_smoothed_mc(
    r: float, r1: float, x0, x0p, eps_f: float, samples: int, seed: int
) -> tuple[float, float]:
    """Mean of the tent-kernel estimator at kernel scale ``eps_f``, by Monte Carlo.

    ``pi int_{D(0,r1)} int g_r(x0, y) g_r(x0', y') f(y - y') dy' dy`` where ``f``
    is the tent density of radius ``eps_f``.  Its ratio to
    :func:`intersection_first_moment_mc` measures the kernel-scale bias of the
    discretised intersection local time.  Radial offsets of the tent law are
    ``eps_f`` times a Beta(2, 2) variable.
    """
    a, b = _as_complex(x0), _as_complex(x0p)
    if not (0 < r1 <= r / 2) or not eps_f > 0:
        raise PreconditionError("need 0 < r1 <= r/2 and eps_f > 0")
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    g = generator(seed)
    rad = r1 * np.sqrt(g.uniform(size=samples))
    y = rad * np.exp(1j * g.uniform(0.0, 2 * math.pi, size=samples))
    off = eps_f * g.beta(2.0, 2.0, size=samples) * np.exp(1j * g.uniform(0.0, 2 * math.pi, size=samples))
    yp = y - off
    inside = np.abs(yp) < r
    vals = np.zeros(samples)
    with np.errstate(divide="ignore"):
        vals[inside] = green_disc_values(r, a, y[inside]) * green_disc_values(r, b, yp[inside])
    area = math.pi * r1 * r1
    est = math.pi * area * float(vals.mean())
    se = math.pi * area * float(vals.std(ddof=1)) / math.sqrt(samples) if samples > 1 else float("nan")
    return est, se


def disc_occupation_mean(r: float, r1: float, x0) -> float:
    """Expected time Brownian motion from ``x0`` spends in ``D(0, r1)`` before leaving ``D(0, r)``.

    For ``|x0| >= r1`` the mean-value property gives ``r1^2 log(r / |x0|)``.
    """
    d = abs(complex(*np.asarray(x0, dtype=float)))
    if not (0 < r1 <= d < r):
        raise PreconditionError("need 0 < r1 <= |x0| < r")
    return r1 * r1 * math.log(r / d)


def moment_bound_curve(k: int, r: float, r1: float, c: float) -> float:
    """``(k!)^2 (log(r/r1) + c)^(2k)``, the bound on normalised intersection moments."""
    if k < 1 or not 0 < r1 <= r / 2 or c < 0:
        raise PreconditionError("need k >= 1, 0 < r1 <= r/2 and c >= 0")
    return math.factorial(k) ** 2 * (math.log(r / r1) + c) ** (2 * k)
