"""Fixed-radius neighbour search by uniform cell hashing.

Points of the second set are bucketed into square cells whose side equals the
search radius, so every neighbour of a query lies in the 3x3 block of cells
around it.  The predicate is ``squared distance < radius**2`` everywhere, which
makes the result identical to a brute-force scan.
"""

from __future__ import annotations

import numpy as np

from .lattice_walk import pack

OFFSETS = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=np.int64)


class CellIndex:
    """Bucketed copy of a point set for repeated radius queries."""

    def __init__(self, points: np.ndarray, cell: float):
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)
        self.cell = float(cell)
        keys = pack(np.floor(self.points / self.cell).astype(np.int64))
        self.order = np.argsort(keys, kind="stable")
        self.sorted_keys = keys[self.order]

    def pairs(self, queries: np.ndarray, radius: float | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Index pairs ``(i, j)`` with ``|queries[i] - points[j]| < radius``.

        ``radius`` defaults to the cell side and must not exceed it.
        """
        radius = self.cell if radius is None else float(radius)
        if radius > self.cell:
            raise ValueError("query radius exceeds the cell side")
        q = np.asarray(queries, dtype=float).reshape(-1, 2)
        if len(q) == 0 or len(self.points) == 0:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        qc = np.floor(q / self.cell).astype(np.int64)
        ii, jj = [], []
        for off in OFFSETS:
            k = pack(qc + off)
            lo = np.searchsorted(self.sorted_keys, k, side="left")
            hi = np.searchsorted(self.sorted_keys, k, side="right")
            cnt = hi - lo
            total = int(cnt.sum())
            if total == 0:
                continue
            i = np.repeat(np.arange(len(q)), cnt)
            first = np.cumsum(cnt) - cnt
            pos = np.arange(total) - np.repeat(first, cnt) + np.repeat(lo, cnt)
            j = self.order[pos]
            d = q[i] - self.points[j]
            keep = d[:, 0] ** 2 + d[:, 1] ** 2 < radius * radius
            ii.append(i[keep])
            jj.append(j[keep])
        if not ii:
            return np.empty(0, np.int64), np.empty(0, np.int64)
        return np.concatenate(ii), np.concatenate(jj)


def disc_sums(centers: np.ndarray, points: np.ndarray, weights, radius: float, block: int = 4096) -> np.ndarray:
    """``sum_j weights[j] * 1{|points[j] - centers[i]| < radius}`` for every center."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    w = np.broadcast_to(np.asarray(weights, dtype=float), (len(points),))
    idx = CellIndex(points, radius)
    out = np.zeros(len(centers))
    for s in range(0, len(centers), block):
        i, j = idx.pairs(centers[s : s + block])
        out[s : s + block] = np.bincount(i, weights=w[j], minlength=len(centers[s : s + block]))
    return out
