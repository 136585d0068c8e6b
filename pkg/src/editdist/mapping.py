"""Tree mappings, their costs, and a brute-force edit distance oracle.

A mapping between dendrograms ``T`` and ``T'`` assigns to every non-root
vertex of either tree one of: a coupling with a non-root vertex of the other
tree, a deletion ``"D"`` or a ghosting ``"G"``.  Deleted vertices are
contracted into their parent; a ghosted vertex must be left with exactly one
surviving child chain, whose coupled vertex absorbs the ghosted edge weight.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .dendrogram import Dendrogram
from .spaces import SpaceMismatchError, Weight

__all__ = [
    "InvalidMappingError",
    "TreeMapping",
    "validate_tree_mapping",
    "tree_mapping_cost",
    "maximal_ghostings",
    "reduce_mapping",
    "order_preserving_couplings",
    "brute_force_tree_distance",
    "random_valid_mapping",
    "SizeLimitError",
]

LEFT, RIGHT = "left", "right"


class InvalidMappingError(ValueError):
    pass


class SizeLimitError(ValueError):
    """Input too large for an exhaustive search."""


@dataclass(frozen=True)
class TreeMapping:
    couples: tuple[tuple[str, str], ...] = ()
    left: Mapping[str, str] = field(default_factory=dict)
    right: Mapping[str, str] = field(default_factory=dict)

    def to_records(self) -> list[list[str]]:
        recs = [["couple", v, w] for v, w in sorted(self.couples)]
        recs += [[op, LEFT, v] for v, op in sorted(self.left.items())]
        recs += [[op, RIGHT, w] for w, op in sorted(self.right.items())]
        return recs

    @classmethod
    def from_records(cls, records: Sequence[Sequence[str]]) -> "TreeMapping":
        couples, left, right = [], {}, {}
        for rec in records:
            kind = rec[0]
            if kind == "couple":
                couples.append((str(rec[1]), str(rec[2])))
            elif kind in ("D", "G"):
                side, v = rec[1], str(rec[2])
                if side not in (LEFT, RIGHT):
                    raise ValueError(f"unknown side {side!r} in mapping record")
                target = left if side == LEFT else right
                if v in target:
                    # keep the conflict visible to validation as a double assignment
                    couples.append((v, "") if side == LEFT else ("", v))
                target[v] = kind
            else:
                raise ValueError(f"unknown mapping record {rec!r}")
        return cls(tuple(couples), left, right)

    @classmethod
    def from_couples(cls, t: Dendrogram, t2: Dendrogram, couples: Mapping[str, str]) -> "TreeMapping":
        """Complete a coupling with maximal ghostings (all other vertices deleted)."""
        left = maximal_ghostings(t, set(couples))
        right = maximal_ghostings(t2, set(couples.values()))
        return cls(
            tuple(sorted(couples.items())),
            {v: s for v, s in left.items() if s != "C"},
            {w: s for w, s in right.items() if s != "C"},
        )


# -- per-side helpers ------------------------------------------------------------


def _bottom_up(t: Dendrogram) -> list[str]:
    return sorted(t.edges, key=lambda v: (-t.depth(v), v))


def _survivors(t: Dendrogram, status: Mapping[str, str]) -> dict[str, list[str]]:
    """For each vertex, the topmost non-deleted vertices strictly below it."""
    tops: dict[str, list[str]] = {}
    for v in sorted(t.vertices, key=lambda u: (-t.depth(u), u)):
        out: list[str] = []
        for c in t.children[v]:
            if status.get(c) == "D":
                out.extend(tops[c])
            else:
                out.append(c)
        tops[v] = out
    return tops


def maximal_ghostings(t: Dendrogram, coupled: set[str]) -> dict[str, str]:
    """Status ``C``/``G``/``D`` for every non-root vertex, ghosting whatever can be ghosted."""
    status: dict[str, str] = {}
    count: dict[str, int] = {}
    for v in _bottom_up(t):
        n = sum(1 if status[c] != "D" else count[c] for c in t.children[v])
        count[v] = n
        if v in coupled:
            status[v] = "C"
        else:
            status[v] = "G" if n == 1 else "D"
    return status


def _segments(t: Dendrogram, status: Mapping[str, str]) -> dict[str, Weight]:
    """Weight of the segment each coupled vertex is shrunk along (ghosted edges absorbed)."""
    seg: dict[str, Weight] = {}
    for v, s in status.items():
        if s != "C":
            continue
        acc = t.weights[v]
        p = t.parent[v]
        while p is not None and p != t.root:
            sp = status[p]
            if sp == "C":
                break
            if sp == "G":
                acc = t.space.combine(acc, t.weights[p])
            p = t.parent[p]
        seg[v] = acc
    return seg


def _side_status(t: Dendrogram, coupled: Sequence[str], ops: Mapping[str, str]) -> dict[str, str]:
    status = {v: op for v, op in ops.items()}
    for v in coupled:
        status[v] = "C"
    return status


# -- validation and cost -------------------------------------------------------------


def validate_tree_mapping(t: Dendrogram, t2: Dendrogram, m: TreeMapping) -> list[str]:
    """List of violated properties (empty when ``m`` is a valid mapping)."""
    problems: list[str] = []
    if t.space != t2.space:
        problems.append("space: the two trees have different weight spaces")
    for side, tree, ops, idx in ((LEFT, t, m.left, 0), (RIGHT, t2, m.right, 1)):
        coupled = [c[idx] for c in m.couples]
        seen: dict[str, int] = {}
        for v in list(coupled) + list(ops):
            seen[v] = seen.get(v, 0) + 1
        for v, n in sorted(seen.items()):
            if v == tree.root:
                problems.append(f"M1: {side} root {v!r} cannot be edited")
            elif v not in tree.parent:
                problems.append(f"M1: {side} vertex {v!r} does not exist")
            elif n > 1:
                problems.append(f"M2: {side} vertex {v!r} is assigned {n} times")
        for v in tree.edges:
            if v not in seen:
                problems.append(f"M1: {side} vertex {v!r} has no assignment")
        for v, op in ops.items():
            if op not in ("D", "G"):
                problems.append(f"M1: {side} vertex {v!r} has unknown edit {op!r}")
    if problems:
        return problems

    pairs = list(m.couples)
    for k, (a, b) in enumerate(pairs):
        for c, d in pairs[k + 1 :]:
            if t.is_above(a, c) != t2.is_above(b, d) or t.is_above(c, a) != t2.is_above(d, b):
                problems.append(f"M3: couples ({a},{b}) and ({c},{d}) do not preserve the order")

    for side, tree, ops, idx in ((LEFT, t, m.left, 0), (RIGHT, t2, m.right, 1)):
        status = _side_status(tree, [c[idx] for c in pairs], ops)
        tops = _survivors(tree, status)
        for v, op in sorted(ops.items()):
            if op == "G" and len(tops[v]) != 1:
                problems.append(
                    f"M4: ghosted {side} vertex {v!r} keeps {len(tops[v])} child chains after deletions"
                )
    return problems


def _cost_from_status(t: Dendrogram, t2: Dendrogram, couples, s1, s2) -> float:
    space = t.space
    cost = sum(t.edge_norm(v) for v, s in s1.items() if s == "D")
    cost += sum(t2.edge_norm(w) for w, s in s2.items() if s == "D")
    seg1, seg2 = _segments(t, s1), _segments(t2, s2)
    for v, w in couples:
        cost += space.distance(seg1[v], seg2[w])
    return cost


def tree_mapping_cost(t: Dendrogram, t2: Dendrogram, m: TreeMapping) -> float:
    problems = validate_tree_mapping(t, t2, m)
    if problems:
        raise InvalidMappingError("; ".join(problems))
    s1 = _side_status(t, [c[0] for c in m.couples], m.left)
    s2 = _side_status(t2, [c[1] for c in m.couples], m.right)
    return _cost_from_status(t, t2, m.couples, s1, s2)


def reduce_mapping(t: Dendrogram, t2: Dendrogram, m: TreeMapping) -> TreeMapping:
    """Equivalent-or-cheaper mapping with maximal ghostings.

    Deletions that leave a vertex with a single child chain become ghostings,
    and a coupled pair whose vertices both have a single chain ending in
    coupled partners is dissolved into two ghostings.
    """
    problems = validate_tree_mapping(t, t2, m)
    if problems:
        raise InvalidMappingError("; ".join(problems))
    couples = dict(m.couples)
    while True:
        s1 = maximal_ghostings(t, set(couples))
        s2 = maximal_ghostings(t2, set(couples.values()))
        tops1, tops2 = _survivors(t, s1), _survivors(t2, s2)

        def chain_end(x: str, status, tops) -> str | None:
            while True:
                if len(tops[x]) != 1:
                    return None
                x = tops[x][0]
                if status[x] == "C":
                    return x

        dissolve = None
        for v, w in sorted(couples.items()):
            c1 = chain_end(v, s1, tops1)
            c2 = chain_end(w, s2, tops2)
            if c1 is not None and c2 is not None and couples.get(c1) == c2:
                dissolve = v
                break
        if dissolve is None:
            break
        del couples[dissolve]
    return TreeMapping.from_couples(t, t2, couples)


# -- exhaustive search ----------------------------------------------------------------


def order_preserving_couplings(t: Dendrogram, t2: Dendrogram) -> Iterator[dict[str, str]]:
    """All partial injections between non-root vertices respecting the ancestor order."""
    left, right = list(t.edges), list(t2.edges)
    above1 = {(a, b): t.is_above(a, b) for a in left for b in left}
    above2 = {(a, b): t2.is_above(a, b) for a in right for b in right}
    chosen: list[tuple[str, str]] = []
    used: set[str] = set()

    def rec(k: int) -> Iterator[dict[str, str]]:
        if k == len(left):
            yield dict(chosen)
            return
        yield from rec(k + 1)
        v = left[k]
        for w in right:
            if w in used:
                continue
            if all(
                above1[v, a] == above2[w, b] and above1[a, v] == above2[b, w] for a, b in chosen
            ):
                chosen.append((v, w))
                used.add(w)
                yield from rec(k + 1)
                chosen.pop()
                used.discard(w)

    yield from rec(0)


def brute_force_tree_distance(
    t: Dendrogram,
    t2: Dendrogram,
    max_edges: int = 6,
    return_mapping: bool = False,
):
    """Minimum mapping cost by exhaustive enumeration.

    Every order-preserving coupling is completed with maximal ghostings, which
    never costs more than any other completion of the same coupling.
    """
    if t.space != t2.space:
        raise SpaceMismatchError("trees live in different weight spaces")
    if len(t.edges) > max_edges or len(t2.edges) > max_edges:
        raise SizeLimitError(
            f"brute force limited to {max_edges} edges per tree, got {len(t.edges)} and {len(t2.edges)}"
        )
    best = float("inf")
    best_couples: dict[str, str] = {}
    for couples in order_preserving_couplings(t, t2):
        s1 = maximal_ghostings(t, set(couples))
        s2 = maximal_ghostings(t2, set(couples.values()))
        cost = _cost_from_status(t, t2, couples.items(), s1, s2)
        if cost < best:
            best, best_couples = cost, couples
    if return_mapping:
        return best, TreeMapping.from_couples(t, t2, best_couples)
    return best


def random_valid_mapping(
    t: Dendrogram,
    t2: Dendrogram,
    rng: random.Random,
    couple_prob: float = 0.6,
    ghost_prob: float = 0.5,
) -> TreeMapping:
    """Random mapping satisfying M1-M4 (ghostings chosen at random where allowed)."""
    left = list(t.edges)
    rng.shuffle(left)
    couples: dict[str, str] = {}
    for v in left:
        if rng.random() > couple_prob:
            continue
        options = [
            w
            for w in t2.edges
            if w not in couples.values()
            and all(
                t.is_above(v, a) == t2.is_above(w, b) and t.is_above(a, v) == t2.is_above(b, w)
                for a, b in couples.items()
            )
        ]
        if options:
            couples[v] = rng.choice(sorted(options))

    def ops_for(tree: Dendrogram, coupled: set[str]) -> dict[str, str]:
        status: dict[str, str] = {}
        count: dict[str, int] = {}
        for v in _bottom_up(tree):
            n = sum(1 if status[c] != "D" else count[c] for c in tree.children[v])
            count[v] = n
            if v in coupled:
                status[v] = "C"
            elif n == 1 and rng.random() < ghost_prob:
                status[v] = "G"
            else:
                status[v] = "D"
        return {v: s for v, s in status.items() if s != "C"}

    return TreeMapping(
        tuple(sorted(couples.items())),
        ops_for(t, set(couples)),
        ops_for(t2, set(couples.values())),
    )
