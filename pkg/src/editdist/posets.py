"""Finite posets, transitive closure/reduction, and persistent sets.

A persistent set is a sequence of finite sets indexed by increasing critical
values, with maps between consecutive ones (for instance the connected
components of sublevel sets).  Its display poset has one element per
``(critical value, component)`` and the order generated by the maps.  The
transitive reduction of a poset with a strictly monotone height becomes an
editable graph; for merge trees this graph is a dendrogram up to order-2
vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .dendrogram import Dendrogram, TreeError, normalize_order2
from .graphs import EditableGraph
from .spaces import ProductSpace, RealSpace

__all__ = [
    "CycleError",
    "transitive_closure",
    "transitive_reduction",
    "FinitePoset",
    "PersistentSet",
    "DisplayPoset",
    "display_poset",
    "weighted_graph_from_poset",
    "merge_tree_from_display",
    "persistent_set_from_samples",
]

Relation = set[tuple[Hashable, Hashable]]


class CycleError(ValueError):
    pass


def _topo_order(nodes: Iterable[Hashable], edges: Iterable[tuple[Hashable, Hashable]]) -> list:
    nodes = list(dict.fromkeys(nodes))
    succ: dict[Hashable, set] = {v: set() for v in nodes}
    indeg = {v: 0 for v in nodes}
    for a, b in edges:
        if a == b:
            raise CycleError(f"self-loop at {a!r}")
        succ.setdefault(a, set())
        succ.setdefault(b, set())
        indeg.setdefault(a, 0)
        indeg.setdefault(b, 0)
        if b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    ready = [v for v in succ if indeg[v] == 0]
    order = []
    while ready:
        v = ready.pop()
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    if len(order) != len(succ):
        raise CycleError("relation contains a cycle")
    return order


def transitive_closure(edges: Iterable[tuple[Hashable, Hashable]], nodes: Iterable[Hashable] = ()) -> Relation:
    """All pairs ``(a, b)`` with a directed path from ``a`` to ``b`` (DAG input)."""
    edges = set(edges)
    order = _topo_order(list(nodes) + [x for e in edges for x in e], edges)
    succ: dict[Hashable, set] = {v: set() for v in order}
    for a, b in edges:
        succ[a].add(b)
    reach: dict[Hashable, set] = {}
    for v in reversed(order):
        r = set()
        for w in succ[v]:
            r.add(w)
            r |= reach[w]
        reach[v] = r
    return {(a, b) for a, rs in reach.items() for b in rs}


def transitive_reduction(edges: Iterable[tuple[Hashable, Hashable]], nodes: Iterable[Hashable] = ()) -> Relation:
    """Smallest edge set with the same closure: drop ``(a, b)`` whenever ``a < c < b`` for some ``c``."""
    closure = transitive_closure(edges, nodes)
    succ: dict[Hashable, set] = {}
    for a, b in closure:
        succ.setdefault(a, set()).add(b)
    return {(a, b) for a, b in closure if not any((c, b) in closure for c in succ[a] if c != b)}


@dataclass(frozen=True)
class FinitePoset:
    elements: tuple[Hashable, ...]
    relation: frozenset[tuple[Hashable, Hashable]] = frozenset()

    def __post_init__(self) -> None:
        elems = tuple(dict.fromkeys(self.elements))
        rel = frozenset((a, b) for a, b in self.relation if a != b)
        for a, b in rel:
            if a not in elems or b not in elems:
                raise ValueError(f"relation pair ({a!r}, {b!r}) uses unknown elements")
        closure = frozenset(transitive_closure(rel, elems))
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "relation", closure)

    def less(self, a: Hashable, b: Hashable) -> bool:
        return (a, b) in self.relation

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return a == b or (a, b) in self.relation

    def cover_relation(self) -> Relation:
        return transitive_reduction(self.relation, self.elements)

    def maximal(self) -> list[Hashable]:
        return [a for a in self.elements if not any(x == a for x, _ in self.relation)]

    def minimal(self) -> list[Hashable]:
        return [a for a in self.elements if not any(y == a for _, y in self.relation)]


# -- persistent sets -------------------------------------------------------------------


@dataclass(frozen=True)
class PersistentSet:
    """Finite sets ``sets[i]`` at increasing ``criticals[i]`` with total maps ``maps[i]: sets[i] -> sets[i+1]``."""

    criticals: tuple[float, ...]
    sets: tuple[tuple[Hashable, ...], ...]
    maps: tuple[Mapping[Hashable, Hashable], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        crit = tuple(float(t) for t in self.criticals)
        sets = tuple(tuple(dict.fromkeys(s)) for s in self.sets)
        maps = tuple(dict(m) for m in self.maps)
        if len(crit) != len(sets):
            raise ValueError("one set per critical value is required")
        if any(b <= a for a, b in zip(crit, crit[1:])):
            raise ValueError("critical values must be strictly increasing")
        if len(maps) != max(0, len(sets) - 1):
            raise ValueError("one map between each pair of consecutive sets is required")
        for i, m in enumerate(maps):
            if set(m) != set(sets[i]):
                raise ValueError(f"map {i} must be defined exactly on set {i}")
            if not set(m.values()) <= set(sets[i + 1]):
                raise ValueError(f"map {i} leaves set {i + 1}")
        object.__setattr__(self, "criticals", crit)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "maps", maps)

    def minimal_critical_set(self) -> "PersistentSet":
        """Drop critical values whose incoming map is a bijection onto an unchanged set."""
        crit, sets, maps = [self.criticals[0]] if self.criticals else [], [self.sets[0]] if self.sets else [], []
        carry: dict[Hashable, Hashable] = {s: s for s in (self.sets[0] if self.sets else ())}
        for i, m in enumerate(self.maps):
            composed = {s: m[carry[s]] for s in carry}
            nxt = self.sets[i + 1]
            is_bijection = len(set(m.values())) == len(m) == len(nxt)
            if is_bijection:
                carry = composed
                continue
            crit.append(self.criticals[i + 1])
            sets.append(nxt)
            maps.append(composed)
            carry = {s: s for s in nxt}
        return PersistentSet(tuple(crit), tuple(sets), tuple(maps))

    def to_json(self) -> dict:
        return {
            "criticals": list(self.criticals),
            "sets": [list(s) for s in self.sets],
            "maps": [{str(k): v for k, v in m.items()} for m in self.maps],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "PersistentSet":
        sets = tuple(tuple(str(x) for x in s) for s in obj["sets"])
        maps = tuple({str(k): str(v) for k, v in m.items()} for m in obj.get("maps", []))
        return cls(tuple(obj["criticals"]), sets, maps)


@dataclass(frozen=True)
class DisplayPoset:
    poset: FinitePoset
    height: Mapping[Hashable, float]

    def covers(self) -> Relation:
        return self.poset.cover_relation()


def display_poset(s: PersistentSet) -> DisplayPoset:
    """Elements ``(t_i, component)``; ``(t_i, a) < (t_{i+1}, m_i(a))`` generates the order."""
    elems = [(t, c) for t, comp in zip(s.criticals, s.sets) for c in comp]
    rel = set()
    for i, m in enumerate(s.maps):
        for a, b in m.items():
            rel.add(((s.criticals[i], a), (s.criticals[i + 1], b)))
    poset = FinitePoset(tuple(elems), frozenset(rel))
    return DisplayPoset(poset, {e: e[0] for e in elems})


def weighted_graph_from_poset(
    p: FinitePoset,
    height: Callable[[Hashable], Any] | Mapping[Hashable, Any] | None = None,
    metric: Callable[[Hashable, Hashable], float] | None = None,
) -> EditableGraph:
    """Transitive reduction of ``p`` as a directed editable graph.

    Edge ``a -> b`` (``a < b``) gets weight ``height(b) - height(a)``; vector
    heights give tuple weights in a product of real lines.  A pseudo-metric
    ``metric(a, b)`` may be given instead of heights.
    """
    if (height is None) == (metric is None):
        raise ValueError("give exactly one of height or metric")
    h = height.__getitem__ if isinstance(height, Mapping) else height
    cover = sorted(p.cover_relation(), key=lambda e: (str(e[0]), str(e[1])))
    names = {e: str(e) for e in p.elements}
    edges = {}
    space = RealSpace()
    for a, b in cover:
        if metric is not None:
            w = float(metric(a, b))
            if w <= 0:
                raise ValueError(f"comparable elements {a!r} < {b!r} are at distance zero")
        else:
            ha, hb = h(a), h(b)
            if isinstance(ha, (tuple, list)):
                w = tuple(float(y) - float(x) for x, y in zip(ha, hb))
                if any(x < 0 for x in w) or not any(x > 0 for x in w):
                    raise ValueError(f"heights must increase strictly along {a!r} < {b!r}")
                space = ProductSpace(tuple(RealSpace() for _ in w))
            else:
                w = float(hb) - float(ha)
                if w <= 0:
                    raise ValueError(f"heights must increase strictly along {a!r} < {b!r}")
        edges[names[a], names[b]] = w
    return EditableGraph([names[e] for e in p.elements], edges, directed=True, space=space)


def merge_tree_from_display(d: DisplayPoset) -> Dendrogram:
    """Dendrogram of a display poset whose top is a single element, order-2 vertices removed.

    The root is the lowest element above which the poset is a chain (the edge
    to infinity is dropped).  Edge weights are height differences.
    """
    p = d.poset
    tops = p.maximal()
    if len(tops) != 1:
        raise TreeError(f"display poset has {len(tops)} maximal elements, not a tree")
    cover = p.cover_relation()
    parent: dict[Hashable, Hashable | None] = {e: None for e in p.elements}
    for a, b in cover:
        if parent[a] is not None:
            raise TreeError(f"element {a!r} has two covers, not a tree")
        parent[a] = b
    names = {e: str(e[1]) if isinstance(e, tuple) and len(e) == 2 else str(e) for e in p.elements}
    if len(set(names.values())) != len(names):
        names = {e: str(e) for e in p.elements}
    tree = Dendrogram(
        {names[e]: (names[q] if q is not None else None) for e, q in parent.items()},
        {names[e]: float(d.height[q]) - float(d.height[e]) for e, q in parent.items() if q is not None},
    )
    # drop the chain up to the top: the root becomes the last vertex with several children
    while len(tree.children[tree.root]) == 1 and len(tree.vertices) > 1:
        (child,) = tree.children[tree.root]
        tree = tree.subtree(child)
    return normalize_order2(tree)


def persistent_set_from_samples(y: Sequence[float]) -> PersistentSet:
    """Persistent set of sublevel components of a sampled function (consecutive samples adjacent)."""
    vals = sorted(set(float(v) for v in y))
    n = len(y)
    up = list(range(n))

    def find(a: int) -> int:
        while up[a] != a:
            up[a] = up[up[a]]
            a = up[a]
        return a

    sets: list[tuple[str, ...]] = []
    maps: list[dict[str, str]] = []
    prev: dict[int, str] = {}
    active = [False] * n
    for t in vals:
        for i in range(n):
            if y[i] == t:
                active[i] = True
        for i in range(n - 1):
            if active[i] and active[i + 1]:
                a, b = find(i), find(i + 1)
                if a != b:
                    up[max(a, b)] = min(a, b)
        comps = sorted({find(i) for i in range(n) if active[i]})
        label = {c: f"c{c}@{t:g}" for c in comps}
        if prev:
            maps.append({name: label[find(i)] for i, name in prev.items()})
        sets.append(tuple(label[c] for c in comps))
        prev = {c: label[c] for c in comps}
    return PersistentSet(tuple(vals), tuple(sets), tuple(maps))
