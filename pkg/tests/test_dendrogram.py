from __future__ import annotations

import random

import pytest

from editdist.dendrogram import Dendrogram, TreeError, normalize_order2, parse_newick, tree_norm
from editdist.spaces import ProductSpace, RealSpace

from helpers import appendix_trees, random_tree


def test_basic_queries_on_the_worked_example():
    t, _ = appendix_trees()
    assert t.root == "r"
    assert t.leaves == ("a", "b", "c")
    assert t.children["d"] == ("a", "b")
    assert t.norm() == 8.0
    assert t.subtree_norm("d") == 2.0
    assert t.lca(["a", "b"]) == "d"
    assert t.lca(["a", "c"]) == "r"
    assert t.root_path("a") == ["a", "d", "r"]
    assert t.is_above("d", "a") and not t.is_above("a", "d")
    assert not t.comparable("a", "c")


def test_levels_match_the_worked_example():
    t, _ = appendix_trees()
    assert {v: t.level(v) for v in t.vertices} == {"a": 0, "b": 0, "c": 1, "d": 1, "r": 2}
    assert sorted(t.level_set(1)) == ["c", "d"]


def test_subtree_keeps_ids_and_weights():
    t, _ = appendix_trees()
    sub = t.subtree("d")
    assert sub.root == "d"
    assert sub.vertices == ("a", "b", "d")
    assert sub.norm() == 2.0


@pytest.mark.parametrize(
    "parent,weights",
    [
        ({"a": None, "b": None}, {}),
        ({"a": "b", "b": "a", "r": None}, {"a": 1, "b": 1}),
        ({"a": "r", "r": None}, {"a": 0}),
        ({"a": "r", "r": None}, {}),
        ({"a": "zz", "r": None}, {"a": 1}),
        ({"a": "r", "r": None}, {"a": 1, "r": 2}),
    ],
    ids=["two-roots", "cycle", "zero-weight", "missing-weight", "unknown-parent", "root-weight"],
)
def test_invalid_trees_rejected(parent, weights):
    with pytest.raises(TreeError):
        Dendrogram(parent, weights)


def test_tree_norm_and_single_vertex():
    assert tree_norm(Dendrogram.single()) == 0.0
    t, t2 = appendix_trees()
    assert tree_norm(t2) == 8.0


def test_split_then_normalize_restores_the_tree():
    rng = random.Random(7)
    for _ in range(50):
        t = random_tree(rng, 6, min_edges=1)
        v = rng.choice(t.edges)
        s = t.split_edge(v, 0.3)
        assert len(s.vertices) == len(t.vertices) + 1
        assert s.norm() == pytest.approx(t.norm())
        assert normalize_order2(s).canonical_form() == normalize_order2(t).canonical_form()


def test_normalize_ghosts_chains_into_the_child():
    t = Dendrogram({"x": "m", "m": "r", "y": "r", "r": None}, {"x": 1, "m": 2, "y": 4})
    n = normalize_order2(t)
    assert n.vertices == ("r", "x", "y")
    assert n.weights["x"] == 3.0
    # no order-2 vertex: returned unchanged
    assert normalize_order2(n) is n


def test_normalize_keeps_a_single_child_root():
    t = Dendrogram({"x": "r", "r": None}, {"x": 2})
    assert normalize_order2(t).vertices == ("r", "x")


def test_canonical_form_is_label_invariant():
    t, _ = appendix_trees()
    relabelled = t.relabel({"a": "q1", "b": "q2", "d": "q3"})
    assert relabelled.canonical_form() == t.canonical_form()
    heavier = Dendrogram(dict(t.parent), {**t.weights, "c": 6})
    assert heavier.canonical_form() != t.canonical_form()


def test_json_round_trip_with_product_weights():
    sp = ProductSpace((RealSpace(), RealSpace()))
    t = Dendrogram({"a": "r", "b": "r", "r": None}, {"a": (1.0, 0.0), "b": (2.0, 3.0)}, sp)
    back = Dendrogram.from_json(t.to_json())
    assert back == t
    assert back.space == sp


def test_newick_parsing():
    t = parse_newick("((a:1,b:1)d:1,c:5)r;")
    ref, _ = appendix_trees()
    assert t.canonical_form() == ref.canonical_form()
    anon = parse_newick("((:1,:2):3,:4);")
    assert len(anon.vertices) == 5
    assert anon.norm() == 10.0
