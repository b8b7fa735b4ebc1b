"""Seeded replication over a thread pool with index-ordered results."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable

from ..errors import ThickpointsError
from ..rng import mix


@dataclass
class ReplicaResult:
    index: int
    seed: int
    value: Any = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


class AllReplicasFailed(ThickpointsError, RuntimeError):
    def __init__(self, first: ReplicaResult):
        super().__init__(f"all replicas failed; replica {first.index}: {first.error}")
        self.first = first


def resolve_threads(threads) -> int:
    if threads in (None, "auto"):
        env = os.environ.get("THICKPOINTS_THREADS")
        if env and env != "auto":
            return max(1, int(env))
        return os.cpu_count() or 1
    return max(1, int(threads))


def replicate(task: Callable[[int, int], Any], replicas: int, master_seed: int, threads=1) -> list[ReplicaResult]:
    """Run ``task(seed, index)`` for ``index < replicas`` with ``seed = mix(master_seed, index)``.

    Results come back sorted by index whatever the thread count.  A failing
    replica is recorded with its error message; only if every replica fails is
    :class:`AllReplicasFailed` raised.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")

    def one(i: int) -> ReplicaResult:
        seed = mix(master_seed, i)
        try:
            return ReplicaResult(i, seed, task(seed, i))
        except Exception as exc:  # recorded, not fatal
            return ReplicaResult(i, seed, error=f"{type(exc).__name__}: {exc}")

    workers = min(resolve_threads(threads), replicas)
    if workers == 1:
        results = [one(i) for i in range(replicas)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(replicas)))
    results.sort(key=lambda r: r.index)
    if not any(r.ok for r in results):
        raise AllReplicasFailed(results[0])
    return results
