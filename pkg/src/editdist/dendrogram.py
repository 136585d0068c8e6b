"""Rooted trees with editable edge weights.

Every non-root vertex ``v`` is identified with the edge ``(v, parent(v))``, so
the weight map is keyed by non-root vertices.
"""

from __future__ import annotations

import json
import re
from typing import Any, Iterable, Mapping

from .spaces import (
    EditableSpace,
    RealSpace,
    Weight,
    decode_space,
    decode_weight,
    encode_space,
    encode_weight,
    space_of,
)

__all__ = [
    "TreeError",
    "Dendrogram",
    "normalize_order2",
    "tree_norm",
    "parse_newick",
]


class TreeError(ValueError):
    """Structural problem with a dendrogram (cycle, unknown vertex, zero weight...)."""


class Dendrogram:
    """Immutable rooted tree whose edges carry non-zero editable weights.

    Parameters
    ----------
    parent:
        Map ``vertex -> parent``; exactly one vertex (the root) maps to ``None``.
    weights:
        Map ``non-root vertex -> weight`` of the edge to its parent.
    space:
        Editable space of the weights.  Inferred from the weights when omitted.
    """

    __slots__ = (
        "root",
        "parent",
        "weights",
        "space",
        "vertices",
        "edges",
        "children",
        "_depth",
        "_norm_below",
    )

    def __init__(
        self,
        parent: Mapping[Any, Any],
        weights: Mapping[Any, Weight],
        space: EditableSpace | None = None,
    ) -> None:
        par = {str(v): (None if p is None else str(p)) for v, p in parent.items()}
        roots = [v for v, p in par.items() if p is None]
        if len(roots) != 1:
            raise TreeError(f"a dendrogram needs exactly one root, found {len(roots)}")
        for v, p in par.items():
            if p is not None and p not in par:
                raise TreeError(f"parent {p!r} of {v!r} is not a vertex")
        wts = {str(v): w for v, w in weights.items()}
        extra = set(wts) - set(par)
        if extra:
            raise TreeError(f"weights given for unknown vertices {sorted(extra)}")
        root = roots[0]
        if root in wts:
            raise TreeError("the root carries no edge weight")
        if space is None:
            space = space_of(next(iter(wts.values()))) if wts else RealSpace()
        clean: dict[str, Weight] = {}
        for v in par:
            if v == root:
                continue
            if v not in wts:
                raise TreeError(f"missing weight for edge above {v!r}")
            w = space.validate(wts[v])
            if space.is_zero(w):
                raise TreeError(f"edge above {v!r} carries the zero weight")
            clean[v] = w

        children: dict[str, list[str]] = {v: [] for v in par}
        for v, p in par.items():
            if p is not None:
                children[p].append(v)

        # depth by walking up; detects cycles
        depth: dict[str, int] = {root: 0}
        for v in par:
            chain = []
            u = v
            while u not in depth:
                chain.append(u)
                u = par[u]
                if len(chain) > len(par):
                    raise TreeError("parent map contains a cycle")
            d = depth[u]
            for x in reversed(chain):
                d += 1
                depth[x] = d

        self.root = root
        self.parent = par
        self.weights = clean
        self.space = space
        self.vertices = tuple(sorted(par))
        self.edges = tuple(v for v in self.vertices if v != root)
        self.children = {v: tuple(sorted(c)) for v, c in children.items()}
        self._depth = depth
        self._norm_below: dict[str, float] | None = None

    # -- basic queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.parent

    def __repr__(self) -> str:
        return f"Dendrogram(root={self.root!r}, n_edges={len(self.edges)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dendrogram):
            return NotImplemented
        return self.parent == other.parent and self.weights == other.weights and self.space == other.space

    def __hash__(self) -> int:
        return hash((self.root, tuple(sorted(self.parent.items()))))

    def _check(self, v: str) -> str:
        if v not in self.parent:
            raise TreeError(f"unknown vertex {v!r}")
        return v

    def is_leaf(self, v: str) -> bool:
        return not self.children[self._check(v)]

    @property
    def leaves(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if not self.children[v])

    def depth(self, v: str) -> int:
        return self._depth[self._check(v)]

    def weight(self, v: str) -> Weight:
        return self.weights[self._check(v)]

    def edge_norm(self, v: str) -> float:
        return self.space.norm(self.weights[v])

    def descendants(self, v: str, include_self: bool = True) -> list[str]:
        """Vertices of ``sub(v)`` in pre-order."""
        out = []
        stack = [self._check(v)]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out if include_self else out[1:]

    def is_above(self, a: str, b: str) -> bool:
        """``a > b``: ``a`` is a proper ancestor of ``b``."""
        self._check(a)
        u = self.parent[self._check(b)]
        while u is not None:
            if u == a:
                return True
            u = self.parent[u]
        return False

    def comparable(self, a: str, b: str) -> bool:
        return a == b or self.is_above(a, b) or self.is_above(b, a)

    # -- paths and levels ------------------------------------------------------

    def root_path(self, v: str) -> list[str]:
        """``[v, parent(v), ..., root]``; index ``i`` is the ``i``-th ancestor."""
        out = [self._check(v)]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        return out

    def path(self, x: str, y: str) -> list[str]:
        """Shortest vertex path from ``x`` to ``y``."""
        px, py = self.root_path(x), self.root_path(y)
        on_y = set(py)
        up = []
        for u in px:
            up.append(u)
            if u in on_y:
                break
        meet = up[-1]
        down = py[: py.index(meet)]
        return up + list(reversed(down))

    def lca(self, vertices: Iterable[str]) -> str:
        vs = list(vertices)
        if not vs:
            raise TreeError("lowest common ancestor of an empty set")
        common = set(self.root_path(vs[0]))
        for v in vs[1:]:
            common &= set(self.root_path(v))
        # the deepest common ancestor
        return max(common, key=lambda u: self._depth[u])

    def length(self, v: str) -> int:
        """Number of vertices on the path from ``v`` to the root, ``v`` included."""
        return self.depth(v) + 1

    @property
    def height(self) -> int:
        """``len(T)``: the maximum of :meth:`length` over all vertices."""
        return max(self._depth.values()) + 1

    def level(self, v: str) -> int:
        return self.height - self.length(v)

    def level_set(self, n: int) -> list[str]:
        return [v for v in self.vertices if self.level(v) == n]

    # -- norms -------------------------------------------------------------------

    def _norms(self) -> dict[str, float]:
        if self._norm_below is None:
            below: dict[str, float] = {}
            for v in sorted(self.vertices, key=lambda u: -self._depth[u]):
                below[v] = sum(below[c] + self.edge_norm(c) for c in self.children[v])
            self._norm_below = below
        return self._norm_below

    def subtree_norm(self, v: str) -> float:
        """``||sub(v)||``: total norm of the edges strictly below ``v``."""
        return self._norms()[self._check(v)]

    def norm(self) -> float:
        return self.subtree_norm(self.root)

    # -- derived trees -------------------------------------------------------------

    def subtree(self, v: str) -> "Dendrogram":
        keep = self.descendants(v)
        parent = {u: (None if u == v else self.parent[u]) for u in keep}
        weights = {u: self.weights[u] for u in keep if u != v}
        return Dendrogram(parent, weights, self.space)

    def order2_vertices(self) -> list[str]:
        return [v for v in self.edges if len(self.children[v]) == 1]

    def normalize(self) -> "Dendrogram":
        return normalize_order2(self)

    def split_edge(self, v: str, fraction: float = 0.5, new_id: str | None = None) -> "Dendrogram":
        """Insert an order-2 vertex on the edge above ``v``; total weight is conserved."""
        if v == self.root:
            raise TreeError("the root has no edge to split")
        self._check(v)
        if new_id is None:
            k = 0
            while f"{v}~{k}" in self.parent:
                k += 1
            new_id = f"{v}~{k}"
        if new_id in self.parent:
            raise TreeError(f"vertex {new_id!r} already exists")
        lo, hi = self.space.split(self.weights[v], fraction)
        if self.space.is_zero(lo) or self.space.is_zero(hi):
            raise TreeError("split fraction produces a zero-weight edge")
        parent = dict(self.parent)
        weights = dict(self.weights)
        parent[new_id] = parent[v]
        parent[v] = new_id
        weights[v] = lo
        weights[new_id] = hi
        return Dendrogram(parent, weights, self.space)

    def relabel(self, mapping: Mapping[str, str]) -> "Dendrogram":
        f = lambda u: mapping.get(u, u)  # noqa: E731
        parent = {f(v): (None if p is None else f(p)) for v, p in self.parent.items()}
        return Dendrogram(parent, {f(v): w for v, w in self.weights.items()}, self.space)

    def canonical_form(self, digits: int = 9) -> str:
        """Isomorphism-invariant string (weights rounded); equal strings mean isomorphic trees."""

        def rnd(obj: Any) -> Any:
            if isinstance(obj, float):
                return round(obj, digits) + 0.0
            if isinstance(obj, list):
                return [rnd(x) for x in obj]
            if isinstance(obj, dict):
                return {k: rnd(x) for k, x in obj.items()}
            return obj

        def enc(v: str) -> str:
            kids = sorted(enc(c) for c in self.children[v])
            head = "" if v == self.root else json.dumps(rnd(encode_weight(self.weights[v])), sort_keys=True)
            return "(" + ",".join(kids) + ")" + head

        return enc(self.root)

    # -- serialization ------------------------------------------------------------

    def to_json(self) -> dict:
        nodes = []
        for v in self.vertices:
            node: dict[str, Any] = {"id": v, "parent": self.parent[v]}
            if v != self.root:
                node["w"] = encode_weight(self.weights[v])
            nodes.append(node)
        return {"root": self.root, "space": encode_space(self.space), "nodes": nodes}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Dendrogram":
        parent: dict[str, str | None] = {}
        weights: dict[str, Weight] = {}
        root = obj.get("root")
        for node in obj["nodes"]:
            v = str(node["id"])
            p = node.get("parent")
            parent[v] = None if p is None else str(p)
            if "w" in node and node["w"] is not None:
                weights[v] = decode_weight(node["w"])
        if root is not None and str(root) not in parent:
            parent[str(root)] = None
        if root is not None and parent.get(str(root)) is not None:
            raise TreeError("declared root has a parent")
        space = decode_space(obj["space"]) if "space" in obj else None
        return cls(parent, weights, space)

    @classmethod
    def single(cls, root: str = "r", space: EditableSpace | None = None) -> "Dendrogram":
        return cls({root: None}, {}, space or RealSpace())


def normalize_order2(t: Dendrogram) -> Dendrogram:
    """Ghost every order-2 vertex (one child and a parent).

    The child edge absorbs the ghosted edge: ``w(child) <- w(child) (.) w(v)``.
    The root is never removed.
    """
    parent = dict(t.parent)
    weights = dict(t.weights)
    children = {v: list(c) for v, c in t.children.items()}
    # deepest first so chains collapse onto their lowest vertex
    for v in sorted(t.edges, key=lambda u: (-t.depth(u), u)):
        if len(children[v]) != 1:
            continue
        (c,) = children[v]
        p = parent[v]
        weights[c] = t.space.combine(weights[c], weights[v])
        parent[c] = p
        children[p].remove(v)
        children[p].append(c)
        del parent[v], weights[v], children[v]
    if len(parent) == len(t.parent):
        return t
    return Dendrogram(parent, weights, t.space)


def tree_norm(t: Dendrogram) -> float:
    return t.norm()


# -- Newick ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*([(),:;]|[^(),:;\s]+)")


def parse_newick(text: str) -> Dendrogram:
    """Parse a Newick string whose branch lengths are positive real weights.

    Unnamed vertices receive ids ``n0, n1, ...``.  The root branch length, if
    present, is ignored.
    """
    tokens = [m.group(1) for m in _TOKEN.finditer(text.strip())]
    pos = 0
    parent: dict[str, str | None] = {}
    weights: dict[str, float] = {}
    counter = iter(range(10**9))

    def peek() -> str | None:
        return tokens[pos] if pos < len(tokens) else None

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise TreeError("unexpected end of Newick string")
        tok = tokens[pos]
        pos += 1
        return tok

    def node() -> tuple[str, list[str], float | None]:
        kids: list[str] = []
        if peek() == "(":
            take()
            while True:
                kids.append(subtree())
                tok = take()
                if tok == ")":
                    break
                if tok != ",":
                    raise TreeError(f"unexpected token {tok!r} in Newick string")
        name = None
        if peek() not in (None, "(", ")", ",", ":", ";"):
            name = take()
        length = None
        if peek() == ":":
            take()
            length = float(take())
        if name is None:
            name = f"n{next(counter)}"
        if name in parent:
            raise TreeError(f"duplicate vertex name {name!r}")
        parent[name] = None
        for k in kids:
            parent[k] = name
        return name, kids, length

    def subtree() -> str:
        name, _, length = node()
        if length is None:
            raise TreeError(f"missing branch length for {name!r}")
        weights[name] = length
        return name

    root, _, _ = node()
    if peek() == ";":
        take()
    if peek() is not None:
        raise TreeError("trailing characters after Newick tree")
    return Dendrogram(parent, weights, RealSpace())
