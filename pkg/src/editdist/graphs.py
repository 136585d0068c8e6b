"""Editable graphs: edge-weighted graphs with weights in an editable space.

Edits are shrinking (change a weight), deletion (contract an edge),
insertion (split a vertex with a new edge), ghosting (replace a chain of
order-2 vertices by one edge) and splitting (its inverse).  A mapping is a
set of couples of segments; its cost is the cost of the edit path it encodes.
Everything here is exhaustive and meant for small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence, Union

from .dendrogram import Dendrogram
from .spaces import (
    EditableSpace,
    SpaceMismatchError,
    Weight,
    decode_space,
    decode_weight,
    encode_space,
    encode_weight,
    space_of,
)

__all__ = [
    "GraphError",
    "CompositionError",
    "EditableGraph",
    "Segment",
    "segment_sum",
    "segment_weight",
    "open_star",
    "is_ghostable",
    "Shrink",
    "Delete",
    "Insert",
    "Ghost",
    "Split",
    "apply_edit",
    "edit_cost",
    "GraphMapping",
    "validate_graph_mapping",
    "graph_mapping_cost",
    "brute_force_graph_distance",
    "normalize_graph",
    "graphs_isomorphic",
]

Edge = tuple[str, str]


class GraphError(ValueError):
    pass


class CompositionError(GraphError):
    """Two segments cannot be concatenated."""


class EditableGraph:
    """Immutable simple graph (no loops, no parallel edges) with nonzero edge weights."""

    def __init__(
        self,
        vertices: Iterable[str],
        edges: Mapping[Edge, Any] | Iterable[tuple[str, str, Any]],
        directed: bool = False,
        space: EditableSpace | None = None,
    ):
        self.directed = bool(directed)
        self.vertices: tuple[str, ...] = tuple(sorted({str(v) for v in vertices}))
        items = edges.items() if isinstance(edges, Mapping) else (((u, v), w) for u, v, w in edges)
        weights: dict[Edge, Weight] = {}
        for (u, v), w in items:
            u, v = str(u), str(v)
            if u == v:
                raise GraphError(f"self-loop at {u!r}")
            for x in (u, v):
                if x not in self.vertices:
                    raise GraphError(f"edge ({u},{v}) references unknown vertex {x!r}")
            key = self.key(u, v)
            if key in weights:
                raise GraphError(f"duplicate edge {key}")
            weights[key] = w
        if space is None:
            space = space_of(next(iter(weights.values()))) if weights else space_of(0.0)
        self.space = space
        for key, w in weights.items():
            weights[key] = w = space.validate(w)
            if space.is_zero(w):
                raise GraphError(f"edge {key} carries the zero weight")
        self.weights: dict[Edge, Weight] = dict(sorted(weights.items()))
        self._adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for u, v in self.weights:
            self._adj[u].append((u, v))
            self._adj[v].append((u, v))

    # -- basics --

    def key(self, u: str, v: str) -> Edge:
        return (u, v) if self.directed or u <= v else (v, u)

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self.weights)

    def has_edge(self, u: str, v: str) -> bool:
        return self.key(u, v) in self.weights

    def weight(self, u: str, v: str) -> Weight:
        return self.weights[self.key(u, v)]

    def incident(self, v: str) -> list[Edge]:
        return list(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def neighbors(self, v: str) -> list[str]:
        return sorted({a if b == v else b for a, b in self._adj[v]})

    def norm(self) -> float:
        return sum(self.space.norm(w) for w in self.weights.values())

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"EditableGraph({kind}, |V|={len(self.vertices)}, |E|={len(self.weights)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EditableGraph):
            return NotImplemented
        return (
            self.directed == other.directed
            and self.vertices == other.vertices
            and self.weights == other.weights
            and self.space == other.space
        )

    def replace(self, vertices=None, weights=None) -> "EditableGraph":
        return EditableGraph(
            self.vertices if vertices is None else vertices,
            self.weights if weights is None else weights,
            self.directed,
            self.space,
        )

    # -- conversion --

    @classmethod
    def from_dendrogram(cls, t: Dendrogram, directed: bool = True) -> "EditableGraph":
        """Tree as a graph; directed edges point from child to parent."""
        return cls(t.vertices, {(v, t.parent[v]): t.weights[v] for v in t.edges}, directed, t.space)

    def to_json(self) -> dict:
        return {
            "directed": self.directed,
            "space": encode_space(self.space),
            "vertices": list(self.vertices),
            "edges": [{"src": u, "dst": v, "w": encode_weight(w)} for (u, v), w in self.weights.items()],
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "EditableGraph":
        space = decode_space(obj["space"]) if "space" in obj else None
        edges = [(e["src"], e["dst"], decode_weight(e["w"])) for e in obj.get("edges", [])]
        verts = set(obj.get("vertices", [])) | {e[0] for e in edges} | {e[1] for e in edges}
        return cls(verts, edges, bool(obj.get("directed", False)), space)


# -- segments ----------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """Simple path ``v_0, ..., v_n`` (n >= 1); undirected segments are stored endpoint-sorted."""

    vertices: tuple[str, ...]
    directed: bool = False

    def __post_init__(self) -> None:
        vs = tuple(str(v) for v in self.vertices)
        if len(vs) < 2:
            raise GraphError("a segment needs at least one edge")
        if len(set(vs)) != len(vs):
            raise GraphError(f"segment {vs} is not simple")
        if not self.directed and vs[0] > vs[-1]:
            vs = vs[::-1]
        object.__setattr__(self, "vertices", vs)

    @property
    def start(self) -> str:
        return self.vertices[0]

    @property
    def end(self) -> str:
        return self.vertices[-1]

    @property
    def interior(self) -> tuple[str, ...]:
        return self.vertices[1:-1]

    def __len__(self) -> int:
        return len(self.vertices) - 1

    def edge_keys(self) -> list[Edge]:
        pairs = zip(self.vertices, self.vertices[1:])
        if self.directed:
            return list(pairs)
        return [(a, b) if a <= b else (b, a) for a, b in pairs]

    def reversed_path(self) -> tuple[str, ...]:
        return self.vertices[::-1]


def segment_sum(s: Segment, t: Segment) -> Segment:
    """Concatenate ``s`` and ``t``; undirected segments may be reoriented to meet."""
    if s.directed != t.directed:
        raise CompositionError("cannot mix directed and undirected segments")
    if s.directed:
        options = [(s.vertices, t.vertices)]
    else:
        a, b = s.vertices, t.vertices
        options = [(a, b), (a, b[::-1]), (a[::-1], b), (a[::-1], b[::-1])]
    for p, q in options:
        if p[-1] == q[0] and not (set(p[:-1]) & set(q)):
            return Segment(p + q[1:], s.directed)
    raise CompositionError(f"segments {s.vertices} and {t.vertices} are not composable")


def _check_segment(g: EditableGraph, s: Segment) -> None:
    if s.directed != g.directed:
        raise GraphError("segment and graph disagree on directedness")
    for u, v in zip(s.vertices, s.vertices[1:]):
        if not g.has_edge(u, v):
            raise GraphError(f"segment edge ({u},{v}) is not in the graph")


def segment_weight(g: EditableGraph, s: Segment) -> Weight:
    """Combined weight of the edges of ``s`` in path order."""
    _check_segment(g, s)
    return g.space.combine_all([g.weight(u, v) for u, v in zip(s.vertices, s.vertices[1:])])


def open_star(g: EditableGraph, s: Segment) -> tuple[frozenset[str], frozenset[Edge]]:
    """Interior vertices of ``s`` and every edge incident to one of them."""
    _check_segment(g, s)
    inner = frozenset(s.interior)
    edges = frozenset(e for v in inner for e in g.incident(v))
    return inner, edges


def is_ghostable(g: EditableGraph, s: Segment) -> bool:
    """True when the star of the interior is the open segment itself (interior vertices of order 2)."""
    _, star = open_star(g, s)
    return star <= set(s.edge_keys())


def all_segments(g: EditableGraph) -> list[Segment]:
    """Every segment of ``g`` (directed graphs: directed paths only)."""
    out: set[Segment] = set()

    def extend(path: list[str]) -> None:
        out.add(Segment(tuple(path), g.directed))
        last = path[-1]
        for u, v in g.incident(last):
            if g.directed and u != last:
                continue
            nxt = v if u == last else u
            if nxt not in path:
                path.append(nxt)
                extend(path)
                path.pop()

    for v in g.vertices:
        for u, w in g.incident(v):
            if g.directed and u != v:
                continue
            extend([v, w if u == v else u])
    return sorted(out, key=lambda s: (len(s), s.vertices))


# -- edits --------------------------------------------------------------------------


@dataclass(frozen=True)
class Shrink:
    edge: Edge
    weight: Weight


@dataclass(frozen=True)
class Delete:
    """Contract ``edge``; the surviving endpoint is ``keep`` (default: a non-pendant endpoint)."""

    edge: Edge
    keep: str | None = None


@dataclass(frozen=True)
class Insert:
    """Split ``vertex`` by a new edge to ``new_vertex``; edges to ``moved`` neighbours follow the new vertex."""

    vertex: str
    new_vertex: str
    weight: Weight
    moved: tuple[str, ...] = ()
    outgoing: bool = True


@dataclass(frozen=True)
class Ghost:
    segment: Segment


@dataclass(frozen=True)
class Split:
    """Subdivide ``edge`` at ``new_vertex``; ``weights`` (first part, second part) must recombine to the old weight."""

    edge: Edge
    new_vertex: str
    fraction: float = 0.5
    weights: tuple[Weight, Weight] | None = None


GraphEdit = Union[Shrink, Delete, Insert, Ghost, Split]


def apply_edit(g: EditableGraph, edit: GraphEdit) -> EditableGraph:
    space = g.space
    if isinstance(edit, Shrink):
        key = g.key(*edit.edge)
        if key not in g.weights:
            raise GraphError(f"no edge {edit.edge}")
        w = space.validate(edit.weight)
        if space.is_zero(w):
            raise GraphError("cannot shrink an edge to the zero weight")
        weights = dict(g.weights)
        weights[key] = w
        return g.replace(weights=weights)

    if isinstance(edit, Delete):
        u, v = edit.edge
        key = g.key(u, v)
        if key not in g.weights:
            raise GraphError(f"no edge {edit.edge}")
        keep = edit.keep
        if keep is None:
            keep = v if g.degree(u) == 1 and g.degree(v) > 1 else u
        if keep not in (u, v):
            raise GraphError(f"keep vertex {keep!r} is not an endpoint of {edit.edge}")
        gone = v if keep == u else u
        weights: dict[Edge, Weight] = {}
        for (a, b), w in g.weights.items():
            if (a, b) == key:
                continue
            a2 = keep if a == gone else a
            b2 = keep if b == gone else b
            if a2 == b2:
                raise GraphError(f"contracting {edit.edge} turns edge ({a},{b}) into a loop")
            k2 = g.key(a2, b2)
            if k2 in weights:
                raise GraphError(f"contracting {edit.edge} creates parallel edges at {k2}")
            weights[k2] = w
        return g.replace(vertices=[x for x in g.vertices if x != gone], weights=weights)

    if isinstance(edit, Insert):
        x, y = edit.vertex, edit.new_vertex
        if x not in g.vertices:
            raise GraphError(f"unknown vertex {x!r}")
        if y in g.vertices:
            raise GraphError(f"vertex {y!r} already exists")
        moved = set(edit.moved)
        if not moved <= set(g.neighbors(x)):
            raise GraphError("moved vertices must be neighbours of the split vertex")
        weights = {}
        for (a, b), w in g.weights.items():
            if a == x and b in moved:
                a = y
            elif b == x and a in moved:
                b = y
            weights[g.key(a, b)] = w
        new_edge = (x, y) if edit.outgoing else (y, x)
        weights[g.key(*new_edge)] = edit.weight
        return g.replace(vertices=list(g.vertices) + [y], weights=weights)

    if isinstance(edit, Ghost):
        s = edit.segment
        _check_segment(g, s)
        if len(s) < 2:
            return g
        if not is_ghostable(g, s):
            raise GraphError(f"segment {s.vertices} has interior vertices of order > 2")
        if g.has_edge(s.start, s.end):
            raise GraphError("ghosting would create parallel edges")
        w = segment_weight(g, s)
        drop = set(s.edge_keys())
        weights = {k: v for k, v in g.weights.items() if k not in drop}
        weights[g.key(s.start, s.end)] = w
        inner = set(s.interior)
        return g.replace(vertices=[x for x in g.vertices if x not in inner], weights=weights)

    if isinstance(edit, Split):
        u, v = edit.edge
        key = g.key(u, v)
        if key not in g.weights:
            raise GraphError(f"no edge {edit.edge}")
        if edit.new_vertex in g.vertices:
            raise GraphError(f"vertex {edit.new_vertex!r} already exists")
        w = g.weights[key]
        if edit.weights is not None:
            lo, hi = (space.validate(x) for x in edit.weights)
            if not space.close(space.combine(lo, hi), w):
                raise GraphError("split weights do not recombine to the edge weight")
        else:
            if not 0.0 < edit.fraction < 1.0:
                raise GraphError("split fraction must lie strictly between 0 and 1")
            lo, hi = space.split(w, edit.fraction)
        a, b = key
        m = edit.new_vertex
        weights = {k: x for k, x in g.weights.items() if k != key}
        if (a, b) == (u, v) or not g.directed:
            first, second = (u, m), (m, v)
        else:  # pragma: no cover - directed keys always match the given order
            first, second = (v, m), (m, u)
        weights[g.key(*first)] = lo
        weights[g.key(*second)] = hi
        return g.replace(vertices=list(g.vertices) + [m], weights=weights)

    raise TypeError(f"unknown edit {edit!r}")


def edit_cost(edit: GraphEdit, space: EditableSpace, graph: EditableGraph | None = None) -> float:
    """Cost of one edit; shrink and delete look up the current weight in ``graph``."""
    if isinstance(edit, (Ghost, Split)):
        return 0.0
    if isinstance(edit, Insert):
        return space.norm(edit.weight)
    if graph is None:
        raise GraphError("the edited graph is needed to price shrink and delete edits")
    old = graph.weight(*edit.edge)
    if isinstance(edit, Shrink):
        return space.distance(old, edit.weight)
    if isinstance(edit, Delete):
        return space.norm(old)
    raise TypeError(f"unknown edit {edit!r}")


# -- mappings -----------------------------------------------------------------------


@dataclass(frozen=True)
class GraphMapping:
    couples: tuple[tuple[Segment, Segment], ...] = ()

    def covered(self, side: int) -> list[Edge]:
        return [e for pair in self.couples for e in pair[side].edge_keys()]

    def deleted(self, g: EditableGraph, side: int) -> list[Edge]:
        used = set(self.covered(side))
        return [e for e in g.edges if e not in used]

    def ghosted(self, side: int) -> list[str]:
        return sorted(v for pair in self.couples for v in pair[side].interior)


class _Classes:
    def __init__(self, vertices: Iterable[str]) -> None:
        self.up = {v: v for v in vertices}

    def find(self, v: str) -> str:
        while self.up[v] != v:
            self.up[v] = self.up[self.up[v]]
            v = self.up[v]
        return v

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.up[max(ra, rb)] = min(ra, rb)


def _reduced(g: EditableGraph, segs: Sequence[Segment], deleted: Sequence[Edge], side: str, problems: list[str]):
    """Contract deleted edges and ghost coupled segments; returns endpoint classes per segment."""
    cls = _Classes(g.vertices)
    for a, b in deleted:
        cls.union(a, b)
    ends: list[tuple[str, str]] = []
    degree: dict[str, int] = {}
    seen: set[tuple[str, str]] = set()
    for s in segs:
        path = [cls.find(v) for v in s.vertices]
        for a, b in zip(path, path[1:]):
            if a == b:
                problems.append(f"G3: {side} segment {s.vertices} collapses to a loop after deletions")
            degree[a] = degree.get(a, 0) + 1
            degree[b] = degree.get(b, 0) + 1
            k = (a, b) if g.directed or a <= b else (b, a)
            if k in seen:
                problems.append(f"G3: {side} edges become parallel at {k} after deletions")
            seen.add(k)
        ends.append((path[0], path[-1]))
    for s in segs:
        for v in s.interior:
            c = cls.find(v)
            if degree.get(c, 0) != 2:
                problems.append(
                    f"G2: {side} ghosted vertex {v!r} has order {degree.get(c, 0)} after deletions"
                )
    return ends


def validate_graph_mapping(g: EditableGraph, g2: EditableGraph, m: GraphMapping) -> list[str]:
    """List of violated properties (empty when ``m`` is valid)."""
    problems: list[str] = []
    if g.space != g2.space:
        problems.append("space: graphs use different weight spaces")
    if g.directed != g2.directed:
        problems.append("space: one graph is directed and the other is not")
    for side, graph, idx in (("left", g, 0), ("right", g2, 1)):
        for pair in m.couples:
            try:
                _check_segment(graph, pair[idx])
            except GraphError as exc:
                problems.append(f"segment: {side} {exc}")
    if problems:
        return problems

    for side, graph, idx in (("left", g, 0), ("right", g2, 1)):
        count: dict[Edge, int] = {}
        for e in m.covered(idx):
            count[e] = count.get(e, 0) + 1
        for e, n in sorted(count.items()):
            if n > 1:
                problems.append(f"G1: {side} edge {e} lies in {n} coupled segments")
        # literal form: every edge at a ghosted vertex is in its segment or deleted
        covered = set(count)
        for pair in m.couples:
            s = pair[idx]
            own = set(s.edge_keys())
            for v in s.interior:
                for e in graph.incident(v):
                    if e not in own and e in covered:
                        problems.append(f"G2: {side} ghosted vertex {v!r} touches coupled edge {e}")
    if problems:
        return problems

    ends1 = _reduced(g, [p[0] for p in m.couples], m.deleted(g, 0), "left", problems)
    ends2 = _reduced(g2, [p[1] for p in m.couples], m.deleted(g2, 1), "right", problems)
    if problems:
        return problems
    if not _consistent_bijection(ends1, ends2, g.directed):
        problems.append("G3: reduced graphs are not isomorphic along the coupling")
    return problems


def _consistent_bijection(ends1, ends2, directed: bool) -> bool:
    fwd: dict[str, str] = {}
    bwd: dict[str, str] = {}

    def assign(pairs) -> list[tuple[str, str]] | None:
        added = []
        for a, b in pairs:
            if a in fwd or b in bwd:
                if fwd.get(a) != b or bwd.get(b) != a:
                    for x, y in added:
                        del fwd[x], bwd[y]
                    return None
                continue
            fwd[a], bwd[b] = b, a
            added.append((a, b))
        return added

    def rec(k: int) -> bool:
        if k == len(ends1):
            return True
        (a, b), (c, d) = ends1[k], ends2[k]
        options = [((a, c), (b, d))]
        if not directed:
            options.append(((a, d), (b, c)))
        for opt in options:
            added = assign(opt)
            if added is None:
                continue
            if rec(k + 1):
                return True
            for x, y in added:
                del fwd[x], bwd[y]
        return False

    return rec(0)


def graph_mapping_cost(g: EditableGraph, g2: EditableGraph, m: GraphMapping) -> float:
    problems = validate_graph_mapping(g, g2, m)
    if problems:
        raise GraphError("invalid mapping: " + "; ".join(problems))
    return _mapping_cost(g, g2, m)


def _mapping_cost(g: EditableGraph, g2: EditableGraph, m: GraphMapping) -> float:
    space = g.space
    cost = sum(space.norm(g.weights[e]) for e in m.deleted(g, 0))
    cost += sum(space.norm(g2.weights[e]) for e in m.deleted(g2, 1))
    for s, t in m.couples:
        cost += space.distance(segment_weight(g, s), segment_weight(g2, t))
    return cost


def brute_force_graph_distance(
    g: EditableGraph,
    g2: EditableGraph,
    max_edges: int = 5,
    return_mapping: bool = False,
):
    """Minimum cost over all valid mappings (exhaustive; tiny graphs only)."""
    if g.space != g2.space:
        raise SpaceMismatchError("graphs use different weight spaces")
    if g.directed != g2.directed:
        raise GraphError("cannot compare a directed with an undirected graph")
    if len(g.edges) > max_edges or len(g2.edges) > max_edges:
        raise GraphError(
            f"brute force limited to {max_edges} edges per graph, got {len(g.edges)} and {len(g2.edges)}"
        )
    space = g.space
    segs1, segs2 = all_segments(g), all_segments(g2)
    w1 = [segment_weight(g, s) for s in segs1]
    w2 = [segment_weight(g2, s) for s in segs2]
    e1 = [set(s.edge_keys()) for s in segs1]
    e2 = [set(s.edge_keys()) for s in segs2]
    n1 = [space.norm(w) for w in w1]
    n2 = [space.norm(w) for w in w2]
    total = g.norm() + g2.norm()

    best = total
    best_map = GraphMapping()
    chosen: list[tuple[int, int]] = []

    edge_norm1 = {e: space.norm(w) for e, w in g.weights.items()}
    edge_norm2 = {e: space.norm(w) for e, w in g2.weights.items()}

    def rec(start: int, used1: set, used2: set, partial: float) -> None:
        # partial = shrink costs - norms of covered edges (relative to deleting everything)
        nonlocal best, best_map
        free = sum(x for e, x in edge_norm1.items() if e not in used1)
        free += sum(x for e, x in edge_norm2.items() if e not in used2)
        if total + partial - free >= best - 1e-12:
            return
        if total + partial < best - 1e-12:
            m = GraphMapping(tuple((segs1[a], segs2[b]) for a, b in chosen))
            if not validate_graph_mapping(g, g2, m):
                best, best_map = total + partial, m
        for a in range(start, len(segs1)):
            if e1[a] & used1:
                continue
            for b in range(len(segs2)):
                if e2[b] & used2:
                    continue
                gain = space.distance(w1[a], w2[b]) - n1[a] - n2[b]
                chosen.append((a, b))
                rec(a + 1, used1 | e1[a], used2 | e2[b], partial + gain)
                chosen.pop()

    rec(0, set(), set(), 0.0)
    if return_mapping:
        return best, best_map
    return best


# -- order-2 normalization and isomorphism -------------------------------------------


def normalize_graph(g: EditableGraph) -> EditableGraph:
    """Ghost order-2 vertices until none can be removed without creating parallel edges."""
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            inc = g.incident(v)
            if len(inc) != 2:
                continue
            (a1, b1), (a2, b2) = inc
            if g.directed:
                if b1 == v and a2 == v:
                    path = (a1, v, b2)
                elif b2 == v and a1 == v:
                    path = (a2, v, b1)
                else:
                    continue
            else:
                path = (a1 if b1 == v else b1, v, a2 if b2 == v else b2)
            if path[0] == path[2] or g.has_edge(path[0], path[2]):
                continue
            g = apply_edit(g, Ghost(Segment(path, g.directed)))
            changed = True
            break
    return g


def graphs_isomorphic(g: EditableGraph, g2: EditableGraph, ignore_isolated: bool = True) -> bool:
    """Weighted isomorphism by backtracking (weights compared with the space tolerance)."""
    if g.directed != g2.directed or g.space != g2.space:
        return False
    space = g.space
    v1 = [v for v in g.vertices if not ignore_isolated or g.degree(v)]
    v2 = [v for v in g2.vertices if not ignore_isolated or g2.degree(v)]
    if len(v1) != len(v2) or len(g.edges) != len(g2.edges):
        return False
    if sorted(g.degree(v) for v in v1) != sorted(g2.degree(v) for v in v2):
        return False
    v1.sort(key=lambda v: -g.degree(v))
    fwd: dict[str, str] = {}
    used: set[str] = set()

    def edge_ok(a: str, b: str) -> bool:
        x, y = fwd[a], fwd[b]
        if g.has_edge(a, b) != g2.has_edge(x, y):
            return False
        if g.has_edge(a, b) and not space.close(g.weight(a, b), g2.weight(x, y)):
            return False
        return True

    def rec(k: int) -> bool:
        if k == len(v1):
            return True
        a = v1[k]
        for x in v2:
            if x in used or g2.degree(x) != g.degree(a):
                continue
            fwd[a] = x
            used.add(x)
            if all(edge_ok(a, b) and (not g.directed or edge_ok(b, a)) for b in v1[:k + 1]):
                if rec(k + 1):
                    return True
            used.discard(x)
            del fwd[a]
        return False

    return rec(0)

