"""Building dendrograms from data, and the runtime benchmark harness.

* :func:`merge_tree_from_samples` - merge tree of the sublevel sets of a
  sampled real function on an interval;
* :func:`single_linkage_dendrogram` - single-linkage clustering tree of a
  point cloud or a distance matrix;
* :func:`random_dendrogram` - single-linkage tree of uniform random points;
* :func:`run_benchmark` - timing of :func:`~editdist.engine.compute_distance`
  on random pairs of growing size.

Merge trees are truncated at their last merge: the infinite edge above it is
not represented.  Edge weights are height differences.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial.distance import pdist, squareform
from scipy.stats import spearmanr

from .dendrogram import Dendrogram
from .engine import compute_distance, default_workers

__all__ = [
    "SampledFunction",
    "merge_tree_from_samples",
    "single_linkage_dendrogram",
    "random_dendrogram",
    "BenchmarkRecord",
    "run_benchmark",
    "write_benchmark_csv",
    "mean_times",
    "time_trend",
]


@dataclass(frozen=True)
class SampledFunction:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self) -> None:
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y):
            raise ValueError("x and y must have the same length")
        if len(x) < 2:
            raise ValueError("at least 2 samples are required")
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ValueError("x values must be strictly increasing")
        if not all(np.isfinite(x)) or not all(np.isfinite(y)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_callable(cls, f, start: float, stop: float, n: int) -> "SampledFunction":
        xs = np.linspace(start, stop, n)
        return cls(tuple(xs), tuple(f(xs)))


class _Forest:
    """Merge bookkeeping shared by the sweep and the linkage builders."""

    def __init__(self) -> None:
        self.parent: dict[str, str | None] = {}
        self.height: dict[str, float] = {}
        self.kids: dict[str, list[str]] = {}
        self._count = 0

    def leaf(self, name: str, h: float) -> str:
        self.parent[name] = None
        self.height[name] = h
        self.kids[name] = []
        return name

    def merge(self, tops: Sequence[str], h: float) -> str:
        """Join component tops at height ``h``; returns the new component top."""
        children: list[str] = []
        for c in tops:
            if self.kids[c] and self.height[c] == h:
                children.extend(self.kids[c])  # same-height merges form one k-ary vertex
                del self.kids[c], self.height[c], self.parent[c]
            else:
                children.append(c)
        kept = [c for c in children if self.height[c] < h]
        flat = [c for c in children if self.height[c] >= h]
        if len(kept) <= 1:
            # merging with components born at this very height creates no new vertex
            top = kept[0] if kept else flat[0]
            for c in flat:
                if c != top:
                    self._absorb(c, top)
            return top
        name = f"m{self._count}"
        self._count += 1
        self.parent[name] = None
        self.height[name] = h
        self.kids[name] = kept
        for c in kept:
            self.parent[c] = name
        for c in flat:
            self._absorb(c, name)
        return name

    def _absorb(self, c: str, into: str) -> None:
        # zero-length branch: hang its children (if any) on `into`, drop the vertex
        for k in self.kids[c]:
            self.parent[k] = into
            self.kids[into].append(k)
        del self.kids[c], self.height[c], self.parent[c]

    def tree(self, root: str) -> Dendrogram:
        weights = {v: self.height[p] - self.height[v] for v, p in self.parent.items() if p is not None}
        return Dendrogram(dict(self.parent), weights)


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.up = list(range(n))

    def find(self, a: int) -> int:
        while self.up[a] != a:
            self.up[a] = self.up[self.up[a]]
            a = self.up[a]
        return a

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.up[rb] = ra
        return ra


def merge_tree_from_samples(f: SampledFunction | tuple[Sequence[float], Sequence[float]]) -> Dendrogram:
    """Merge tree of the sublevel sets of a sampled function.

    Samples are swept by increasing value (ties in x order); consecutive
    samples are adjacent.  Leaves are local minima, internal vertices merges.
    """
    if not isinstance(f, SampledFunction):
        f = SampledFunction(*f)
    y = f.y
    n = len(y)
    order = sorted(range(n), key=lambda i: (y[i], i))
    uf = _UnionFind(n)
    active = [False] * n
    top: dict[int, str] = {}
    forest = _Forest()
    for i in order:
        active[i] = True
        comps = sorted({uf.find(j) for j in (i - 1, i + 1) if 0 <= j < n and active[j]})
        if not comps:
            top[i] = forest.leaf(f"min{i}", y[i])
            continue
        tops = [top.pop(c) for c in comps]
        r = comps[0]
        for c in comps[1:]:
            r = uf.union(r, c)
        r = uf.union(r, i)
        top[r] = tops[0] if len(tops) == 1 else forest.merge(tops, y[i])
    (root,) = top.values()
    return forest.tree(root)


def single_linkage_dendrogram(data, precomputed: bool = False, tol: float = 1e-12) -> Dendrogram:
    """Single-linkage dendrogram of points (rows) or of a distance matrix.

    Leaves sit at height 0 and are named ``p<index>``.  Merges at equal
    distance happen simultaneously and create one vertex with several
    children.
    """
    arr = np.asarray(data, dtype=float)
    if precomputed:
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("a distance matrix must be square")
        if not np.allclose(arr, arr.T, atol=tol, rtol=0):
            raise ValueError("distance matrix is not symmetric")
        if np.any(arr < 0) or np.any(np.abs(np.diag(arr)) > tol):
            raise ValueError("distances must be non-negative with a zero diagonal")
        dist = arr
    else:
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError("points must be a 1-D or 2-D array")
        dist = squareform(pdist(arr)) if len(arr) > 1 else np.zeros((len(arr), len(arr)))
    n = dist.shape[0]
    if n < 1:
        raise ValueError("at least one point is required")

    forest = _Forest()
    top = {i: forest.leaf(f"p{i}", 0.0) for i in range(n)}
    if n == 1:
        return forest.tree(top[0])
    iu, ju = np.triu_indices(n, k=1)
    d = dist[iu, ju]
    order = np.argsort(d, kind="stable")
    uf = _UnionFind(n)
    k = 0
    while k < len(order):
        h = float(d[order[k]])
        group = []
        while k < len(order) and float(d[order[k]]) == h:
            group.append((int(iu[order[k]]), int(ju[order[k]])))
            k += 1
        # components joined at height h, grouped through a scratch union-find on roots
        pending: dict[int, set[int]] = {}
        links = _UnionFind(n)
        touched = set()
        for a, b in group:
            ra, rb = uf.find(a), uf.find(b)
            if ra != rb:
                links.union(ra, rb)
                touched.update((ra, rb))
        for r in touched:
            pending.setdefault(links.find(r), set()).add(r)
        for roots in pending.values():
            roots = sorted(roots)
            tops = [top.pop(r) for r in roots]
            new_root = roots[0]
            for r in roots[1:]:
                new_root = uf.union(new_root, r)
            top[new_root] = forest.merge(tops, h)
    (root,) = top.values()
    return forest.tree(root)


def random_dendrogram(
    leaves: int,
    seed: int | np.random.SeedSequence | None = None,
    interval: tuple[float, float] = (0.0, 1.0),
) -> Dendrogram:
    """Single-linkage dendrogram of ``leaves`` uniform random points on ``interval``."""
    if leaves < 1:
        raise ValueError("leaves must be at least 1")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(interval[0], interval[1], size=leaves)
    return single_linkage_dendrogram(pts)


# -- benchmark ------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchmarkRecord:
    leaves: int
    trial: int
    build_time: float
    solve_time: float
    total_time: float
    distance: float


def _bench_pair(args) -> BenchmarkRecord:
    n, trial, seq = args
    s1, s2 = seq.spawn(2)
    t1 = random_dendrogram(n, s1)
    t2 = random_dendrogram(n, s2)
    start = time.perf_counter()
    value, table = compute_distance(t1, t2, workers=1)
    total = time.perf_counter() - start
    return BenchmarkRecord(n, trial, table.build_time, table.solve_time, total, value)


def run_benchmark(
    n_min: int = 5,
    n_max: int = 12,
    trials: int = 20,
    parallel: bool = False,
    seed: int = 0,
    csv_path: str | Path | None = None,
    workers: int | None = None,
    max_leaves: int = 20,
) -> list[BenchmarkRecord]:
    """Time distance computations between random dendrogram pairs.

    For every leaf count ``n`` in ``[n_min, n_max]`` draw ``trials`` pairs of
    random dendrograms with ``n`` leaves each.  Pairs run in worker processes
    when ``parallel`` is set (capped by ``EDITDIST_THREADS``).
    """
    if not (1 <= n_min <= n_max):
        raise ValueError("need 1 <= n_min <= n_max")
    if n_max > max_leaves:
        raise ValueError(f"n_max={n_max} exceeds the configured limit of {max_leaves} leaves")
    if trials < 1:
        raise ValueError("trials must be positive")
    tasks = []
    for n in range(n_min, n_max + 1):
        per_n = np.random.SeedSequence([seed, n])
        for trial, seq in enumerate(per_n.spawn(trials)):
            tasks.append((n, trial, seq))
    nworkers = (workers or default_workers()) if parallel else 1
    if nworkers > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            records = list(pool.map(_bench_pair, tasks))
    else:
        records = [_bench_pair(t) for t in tasks]
    if csv_path is not None:
        write_benchmark_csv(records, csv_path)
    return records


def write_benchmark_csv(records: Sequence[BenchmarkRecord], path: str | Path) -> Path:
    path = Path(path)
    names = [f.name for f in fields(BenchmarkRecord)]
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        for r in records:
            writer.writerow(asdict(r))
    return path


def mean_times(records: Sequence[BenchmarkRecord]) -> dict[int, float]:
    out: dict[int, list[float]] = {}
    for r in records:
        out.setdefault(r.leaves, []).append(r.total_time)
    return {n: float(np.mean(v)) for n, v in sorted(out.items())}


def time_trend(records: Sequence[BenchmarkRecord]) -> float:
    """Spearman rank correlation between leaf count and mean total time."""
    means = mean_times(records)
    if len(means) < 2:
        return float("nan")
    rho = spearmanr(list(means), list(means.values()))[0]
    return float(rho)
