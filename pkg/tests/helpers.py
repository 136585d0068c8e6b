"""Shared builders for the test suite."""

from __future__ import annotations

import random

from editdist.dendrogram import Dendrogram
from editdist.graphs import EditableGraph


def appendix_trees() -> tuple[Dendrogram, Dendrogram]:
    """The two five-vertex trees of the worked example (primes written as a 2 suffix)."""
    t = Dendrogram(
        {"a": "d", "b": "d", "d": "r", "c": "r", "r": None},
        {"a": 1, "b": 1, "d": 1, "c": 5},
    )
    t2 = Dendrogram(
        {"a2": "d2", "b2": "d2", "d2": "r2", "c2": "r2", "r2": None},
        {"a2": 1, "b2": 2, "d2": 3, "c2": 2},
    )
    return t, t2


def random_tree(rng: random.Random, max_edges: int = 5, prefix: str = "v", min_edges: int = 0) -> Dendrogram:
    """Random recursive tree with integer weights in [1, 5]."""
    n = rng.randint(min_edges, max_edges)
    parent: dict[str, str | None] = {f"{prefix}0": None}
    weights = {}
    for k in range(1, n + 1):
        parent[f"{prefix}{k}"] = f"{prefix}{rng.randrange(k)}"
        weights[f"{prefix}{k}"] = rng.randint(1, 5)
    return Dendrogram(parent, weights)


def random_graph(rng: random.Random, max_edges: int = 5, directed: bool = False, prefix: str = "v") -> EditableGraph:
    nv = rng.randint(2, 5)
    vs = [f"{prefix}{i}" for i in range(nv)]
    pairs = [(a, b) for a in vs for b in vs if a != b and (directed or a < b)]
    rng.shuffle(pairs)
    target = rng.randint(0, max_edges)
    edges: dict[tuple[str, str], int] = {}
    for a, b in pairs:
        if len(edges) >= target:
            break
        if (b, a) in edges:
            continue
        edges[a, b] = rng.randint(1, 5)
    return EditableGraph(vs, edges, directed)


def random_split(t: Dendrogram, rng: random.Random) -> Dendrogram:
    """Split a random edge at a random fraction."""
    v = rng.choice(t.edges)
    return t.split_edge(v, rng.choice([0.25, 0.5, 0.75]), new_id=f"{v}_split")


def full_binary_tree(depth: int, prefix: str = "n", weight: float = 1.0) -> Dendrogram:
    """Complete binary tree with ``2**depth`` leaves; vertex ids spell the path from the root."""
    parent: dict[str, str | None] = {prefix: None}
    weights = {}
    frontier = [prefix]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for side in "LR":
                c = v + side
                parent[c] = v
                weights[c] = weight
                nxt.append(c)
        frontier = nxt
    return Dendrogram(parent, weights)
