"""Binary linear program for the distance between two rooted subtrees.

For a couple of subtrees ``T_x`` and ``T_y`` every variable pairs a root-ward
segment of ``T_x`` (a vertex ``v`` together with its first ``i`` proper
ancestors, all strictly below ``x``) with a segment of ``T_y``.  Choosing a
variable means: shrink one segment onto the other, keep the subtrees hanging
below the two bottom vertices at their already known distance, and delete
everything else.  Leaf packing constraints make the chosen segments pairwise
disjoint and root-ward incomparable on each side.

The program is solved exactly by branch and bound (see :func:`solve`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .dendrogram import Dendrogram
from .spaces import RealSpace, SpaceMismatchError

__all__ = [
    "MissingEntryError",
    "BlpProblem",
    "BlpSolution",
    "delta_cost",
    "segments",
    "build_problem",
    "solve",
    "write_lp",
]

Variable = tuple[str, str, int, int]


class MissingEntryError(KeyError):
    """A subtree distance needed to assemble a problem has not been computed."""


@dataclass
class BlpProblem:
    """``min offset + coefficients @ delta`` subject to ``sum(delta[c]) <= 1`` for each constraint."""

    variables: list[Variable]
    coefficients: np.ndarray
    deltas: np.ndarray
    offset: float
    constraints: list[tuple[int, ...]]
    families: list[str] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)
    x: str | None = None
    y: str | None = None

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        self.deltas = np.asarray(self.deltas, dtype=float)
        if not self.families:
            self.families = ["all"] * len(self.constraints)
        if not self.labels:
            self.labels = [f"c{k}" for k in range(len(self.constraints))]

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def index(self, v: str, w: str, i: int, j: int) -> int:
        return self.variables.index((v, w, i, j))

    def value(self, chosen: Sequence[int]) -> float:
        return float(self.offset + sum(self.coefficients[k] for k in chosen))

    def is_feasible(self, chosen: Sequence[int]) -> bool:
        picked = set(chosen)
        if len(picked) != len(chosen):
            return False
        return all(sum(1 for k in c if k in picked) <= 1 for c in self.constraints)


@dataclass(frozen=True)
class BlpSolution:
    chosen: tuple[int, ...]
    value: float
    optimal: bool = True
    nodes: int = 0

    def chosen_variables(self, problem: BlpProblem) -> list[Variable]:
        return [problem.variables[k] for k in self.chosen]


# -- assembly --------------------------------------------------------------------


def _segment_table(t: Dendrogram):
    """One row per root-ward segment ``(v, i)`` of ``t`` (segments never reach the root)."""
    rows = []
    for v in t.edges:
        path = t.root_path(v)
        acc = t.space.zero()
        norms = 0.0
        for i, top in enumerate(path[:-1]):
            acc = t.space.combine(acc, t.weights[top])
            norms += t.edge_norm(top)
            rows.append((v, i, top, acc, norms))
    return rows


def segments(t: Dendrogram) -> list[tuple[str, int, str]]:
    """``(bottom, i, top)`` for every segment usable in a problem rooted at ``t.root``."""
    return [(v, i, top) for v, i, top, _, _ in _segment_table(t)]


def delta_cost(tx: Dendrogram, ty: Dendrogram, v: str, w: str, i: int, j: int) -> float:
    """Distance between the combined weights of ``v, ..., v_i`` and ``w, ..., w_j``."""
    if tx.space != ty.space:
        raise SpaceMismatchError("trees live in different weight spaces")
    pv, pw = tx.root_path(v), ty.root_path(w)
    if v == tx.root or w == ty.root:
        raise IndexError("segments cannot start at the root")
    if not (0 <= i < len(pv) - 1) or not (0 <= j < len(pw) - 1):
        raise IndexError(f"segment index out of range: i={i}, j={j}")
    a = tx.space.combine_all([tx.weights[u] for u in pv[: i + 1]])
    b = ty.space.combine_all([ty.weights[u] for u in pw[: j + 1]])
    return tx.space.distance(a, b)


def build_problem(tx: Dendrogram, ty: Dendrogram, table: Mapping[tuple[str, str], float]) -> BlpProblem:
    """Assemble the program for the couple ``(tx.root, ty.root)``.

    ``table`` must hold the distance between every pair of proper subtrees,
    keyed by ``(vertex of tx, vertex of ty)``.
    """
    if tx.space != ty.space:
        raise SpaceMismatchError("trees live in different weight spaces")
    space = tx.space
    left, right = _segment_table(tx), _segment_table(ty)
    n1, n2 = len(left), len(right)

    if isinstance(space, RealSpace):
        a = np.array([r[3] for r in left], dtype=float)
        b = np.array([r[3] for r in right], dtype=float)
        delta = np.abs(a[:, None] - b[None, :])
    else:
        delta = np.array([[space.distance(r[3], s[3]) for s in right] for r in left], dtype=float).reshape(n1, n2)

    sub1 = {v: tx.subtree_norm(v) for v in tx.edges}
    sub2 = {w: ty.subtree_norm(w) for w in ty.edges}
    keep1 = np.array([r[4] + sub1[r[0]] for r in left], dtype=float)
    keep2 = np.array([s[4] + sub2[s[0]] for s in right], dtype=float)
    sub_dist = np.empty((n1, n2))
    for p, r in enumerate(left):
        for q, s in enumerate(right):
            key = (r[0], s[0])
            try:
                sub_dist[p, q] = table[key]
            except KeyError as exc:
                raise MissingEntryError(f"no subtree distance for {key}") from exc
    coeff = delta - keep1[:, None] - keep2[None, :] + sub_dist

    variables = [(r[0], s[0], r[1], s[1]) for r in left for s in right]

    # leaf l of tx: every variable whose left segment top is an ancestor-or-self of l
    constraints: list[tuple[int, ...]] = []
    families: list[str] = []
    labels: list[str] = []
    for fam, tree, rows, other in (("left", tx, left, n2), ("right", ty, right, n1)):
        for leaf in tree.leaves:
            on_path = set(tree.root_path(leaf))
            hit = [p for p, r in enumerate(rows) if r[2] in on_path]
            if fam == "left":
                idx = tuple(p * n2 + q for p in hit for q in range(other))
            else:
                idx = tuple(sorted(p * n2 + q for q in hit for p in range(other)))
            constraints.append(idx)
            families.append(fam)
            labels.append(f"{fam}:{leaf}")

    return BlpProblem(
        variables=variables,
        coefficients=coeff.reshape(-1),
        deltas=delta.reshape(-1),
        offset=tx.norm() + ty.norm(),
        constraints=constraints,
        families=families,
        labels=labels,
        x=tx.root,
        y=ty.root,
    )


# -- solving ------------------------------------------------------------------------


class _Family:
    """Upper bound for one constraint family via a DP over laminar supports."""

    def __init__(self, supports: list[frozenset[int]]):
        distinct = sorted({s for s in supports if s}, key=lambda s: (len(s), sorted(s)))
        self.node_of = [distinct.index(s) if s else -1 for s in supports]
        self.laminar = all(
            a <= b or b <= a or not (a & b) for k, a in enumerate(distinct) for b in distinct[k + 1 :]
        )
        self.size = len(distinct)
        self.parent = []
        for k, s in enumerate(distinct):
            sup = [m for m in range(k + 1, len(distinct)) if s < distinct[m]]
            self.parent.append(min(sup, key=lambda m: len(distinct[m])) if sup else -1)

    def bound(self, cands: list[int], weight: list[float]) -> float:
        if not self.laminar:
            return sum(weight[c] for c in cands)
        best = [0.0] * self.size
        free = 0.0
        for c in cands:
            n = self.node_of[c]
            if n < 0:
                free += weight[c]
            elif weight[c] > best[n]:
                best[n] = weight[c]
        below = [0.0] * self.size
        total = free
        for n in range(self.size):  # supports sorted by size, children first
            u = max(best[n], below[n])
            p = self.parent[n]
            if p < 0:
                total += u
            else:
                below[p] += u
        return total


def solve(problem: BlpProblem, eps: float = 1e-12) -> BlpSolution:
    """Exact minimum of a packing-constrained 0-1 program.

    Only variables with negative coefficients can improve on the all-zero
    solution.  Among variables appearing in exactly the same constraints only
    the cheapest is kept.  The remaining maximum-weight independent set
    problem is searched depth first, branching on the heaviest candidate, and
    pruned with the smaller of two per-family bounds: within a laminar family
    of constraint supports the best packing is a simple bottom-up DP.
    """
    coeff = problem.coefficients
    n = len(problem.variables)
    member: list[list[int]] = [[] for _ in range(n)]
    for ci, c in enumerate(problem.constraints):
        for k in c:
            member[k].append(ci)

    always: list[int] = []
    by_support: dict[tuple[int, ...], int] = {}
    for k in range(n):
        if not coeff[k] < -eps:
            continue
        sup = tuple(member[k])
        if not sup:
            always.append(k)
            continue
        cur = by_support.get(sup)
        if cur is None or coeff[k] < coeff[cur]:
            by_support[sup] = k

    cand = sorted(by_support.values(), key=lambda k: (coeff[k], k))
    m = len(cand)
    weight = [-float(coeff[k]) for k in cand]
    sup_of = [tuple(member[k]) for k in cand]

    cons_mask: dict[int, int] = {}
    for p, sup in enumerate(sup_of):
        for ci in sup:
            cons_mask[ci] = cons_mask.get(ci, 0) | (1 << p)
    conflict = []
    for p, sup in enumerate(sup_of):
        mask = 0
        for ci in sup:
            mask |= cons_mask[ci]
        conflict.append(mask)

    fam_names = sorted(set(problem.families))
    families = []
    for fam in fam_names:
        supports = [frozenset(ci for ci in sup if problem.families[ci] == fam) for sup in sup_of]
        families.append(_Family(supports))

    def bits(mask: int) -> list[int]:
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def upper(mask: int) -> float:
        cs = bits(mask)
        if not cs:
            return 0.0
        return min(f.bound(cs, weight) for f in families) if families else sum(weight[c] for c in cs)

    # greedy incumbent
    best_set: list[int] = []
    rem = (1 << m) - 1
    for p in range(m):
        if rem >> p & 1:
            best_set.append(p)
            rem &= ~conflict[p]
    best_val = sum(weight[p] for p in best_set)

    nodes = 0
    chosen: list[int] = []

    def search(mask: int, val: float) -> None:
        nonlocal best_val, best_set, nodes
        nodes += 1
        if mask == 0:
            if val > best_val + 1e-12:
                best_val, best_set = val, list(chosen)
            return
        if val + upper(mask) <= best_val + 1e-12:
            return
        p = (mask & -mask).bit_length() - 1  # candidates are sorted heaviest first
        chosen.append(p)
        search(mask & ~conflict[p], val + weight[p])
        chosen.pop()
        search(mask & ~(1 << p), val)

    if m:
        search((1 << m) - 1, 0.0)

    picked = sorted(always + [cand[p] for p in best_set])
    value = problem.value(picked)
    return BlpSolution(tuple(picked), value, True, nodes)


# -- LP export --------------------------------------------------------------------


def write_lp(problem: BlpProblem, path: str | Path) -> Path:
    """Write the problem in CPLEX LP text format (offset recorded as a comment and a fixed variable)."""
    path = Path(path)
    names = [f"d{k}" for k in range(problem.n_variables)]
    lines = [f"\\ couple {problem.x} {problem.y}; offset {problem.offset!r}"]
    for k, var in enumerate(problem.variables):
        lines.append(f"\\ {names[k]} = {var}")
    terms = [f"{c:+.17g} {nm}" for c, nm in zip(problem.coefficients, names)]
    terms.append(f"{problem.offset:+.17g} one")
    lines.append("Minimize")
    lines.append(" obj: " + " ".join(terms))
    lines.append("Subject To")
    lines.append(" fix_one: one = 1")
    for label, c in zip(problem.labels, problem.constraints):
        safe = "".join(ch if ch.isalnum() else "_" for ch in label)
        body = " + ".join(names[k] for k in c) if c else "0 one"
        lines.append(f" {safe}: {body} <= 1")
    lines.append("Binary")
    lines.extend(f" {nm}" for nm in names)
    lines.append("End")
    path.write_text("\n".join(lines) + "\n")
    return path

