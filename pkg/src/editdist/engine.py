"""Bottom-up computation of the edit distance between two dendrograms.

Subtree distances are filled into a table level by level: a couple ``(x, y)``
is solved in wave ``max(level(x), level(y))``, which only needs couples of
strictly lower levels.  Couples inside one wave are independent and may be
solved in parallel worker processes.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from .blp import build_problem, solve, write_lp
from .dendrogram import Dendrogram, normalize_order2
from .spaces import SpaceMismatchError

__all__ = ["DistanceTable", "compute_distance", "distance_matrix", "default_workers"]


def default_workers() -> int:
    """Worker cap from ``EDITDIST_THREADS`` (defaults to 1)."""
    raw = os.environ.get("EDITDIST_THREADS", "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"EDITDIST_THREADS must be an integer, got {raw!r}") from exc
    return max(1, n)


@dataclass
class DistanceTable(Mapping[tuple[str, str], float]):
    """Distances ``d(sub(v), sub(w))`` keyed by ``(vertex of T, vertex of T')``."""

    entries: dict[tuple[str, str], float] = field(default_factory=dict)
    frontier: int = -1
    build_time: float = 0.0
    solve_time: float = 0.0
    problems: int = 0
    variables: int = 0

    def __getitem__(self, key: tuple[str, str]) -> float:
        return self.entries[key]

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def restrict(self, left: Sequence[str], right: Sequence[str]) -> dict[tuple[str, str], float]:
        return {(v, w): self.entries[v, w] for v in left for w in right}


def _solve_couple(tx: Dendrogram, ty: Dendrogram, sub_table, lp_dir: str | None):
    t0 = time.perf_counter()
    problem = build_problem(tx, ty, sub_table)
    t1 = time.perf_counter()
    if lp_dir is not None:
        write_lp(problem, Path(lp_dir) / f"couple_{tx.root}__{ty.root}.lp")
    sol = solve(problem)
    t2 = time.perf_counter()
    return sol.value, t1 - t0, t2 - t1, problem.n_variables


def _solve_task(args):
    return _solve_couple(*args)


def compute_distance(
    t: Dendrogram,
    t2: Dendrogram,
    workers: int | None = None,
    lp_dir: str | Path | None = None,
) -> tuple[float, DistanceTable]:
    """Edit distance between ``t`` and ``t2`` and the full subtree table.

    Both trees are normalized first (order-2 vertices ghosted away), so table
    keys refer to the vertices of the normalized trees.  ``workers`` defaults
    to the ``EDITDIST_THREADS`` cap; ``1`` runs everything in-process.
    """
    if t.space != t2.space:
        raise SpaceMismatchError("trees live in different weight spaces")
    t, t2 = normalize_order2(t), normalize_order2(t2)
    workers = default_workers() if workers is None else max(1, int(workers))
    if lp_dir is not None:
        Path(lp_dir).mkdir(parents=True, exist_ok=True)
        lp_dir = str(lp_dir)

    table = DistanceTable()
    sub1 = {v: t.subtree(v) for v in t.vertices}
    sub2 = {w: t2.subtree(w) for w in t2.vertices}
    lvl1 = {v: t.level(v) for v in t.vertices}
    lvl2 = {w: t2.level(w) for w in t2.vertices}
    waves: dict[int, list[tuple[str, str]]] = {}
    for v in t.vertices:
        for w in t2.vertices:
            waves.setdefault(max(lvl1[v], lvl2[w]), []).append((v, w))

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for n in sorted(waves):
            hard: list[tuple[str, str]] = []
            for v, w in waves[n]:
                if t.is_leaf(v):
                    table.entries[v, w] = sub2[w].norm()
                elif t2.is_leaf(w):
                    table.entries[v, w] = sub1[v].norm()
                else:
                    hard.append((v, w))
            tasks = [
                (
                    sub1[v],
                    sub2[w],
                    table.restrict(sub1[v].edges, sub2[w].edges) if pool else table.entries,
                    lp_dir,
                )
                for v, w in hard
            ]
            if pool is not None and len(tasks) > 1:
                results = list(pool.map(_solve_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
            else:
                results = [_solve_task(task) for task in tasks]
            for (v, w), (value, tb, ts, nv) in zip(hard, results):
                table.entries[v, w] = value
                table.build_time += tb
                table.solve_time += ts
                table.problems += 1
                table.variables += nv
            table.frontier = n
    finally:
        if pool is not None:
            pool.shutdown()
    return table[t.root, t2.root], table


def distance_matrix(trees: Sequence[Dendrogram], workers: int | None = None) -> np.ndarray:
    """Symmetric matrix of pairwise distances (upper triangle computed, mirrored)."""
    trees = list(trees)
    if trees:
        space = trees[0].space
        for tr in trees[1:]:
            if tr.space != space:
                raise SpaceMismatchError("all trees must share one weight space")
    n = len(trees)
    out = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            out[a, b] = out[b, a] = compute_distance(trees[a], trees[b], workers=workers)[0]
    return out
