from __future__ import annotations

import csv

import numpy as np
import pytest

from editdist.ingest import (
    BenchmarkRecord,
    SampledFunction,
    mean_times,
    merge_tree_from_samples,
    random_dendrogram,
    run_benchmark,
    single_linkage_dendrogram,
    time_trend,
    write_benchmark_csv,
)
from editdist.mapping import brute_force_tree_distance


def test_merge_tree_of_two_valleys():
    t = merge_tree_from_samples(([0, 1, 2, 3, 4], [1.0, 0.0, 2.0, -1.0, 3.0]))
    assert sorted(t.leaves) == ["min1", "min3"]
    assert sorted(t.weights.values()) == [2.0, 3.0]
    assert len(t.vertices) == 3  # truncated at the merge


def test_equal_height_merges_share_one_vertex():
    t = merge_tree_from_samples((range(5), [0.0, 1.0, 0.0, 1.0, 0.0]))
    assert len(t.children[t.root]) == 3
    assert all(w == 1.0 for w in t.weights.values())


def test_plateaus_do_not_create_zero_edges():
    t = merge_tree_from_samples((range(6), [0.0, 0.0, 2.0, 1.0, 1.0, 3.0]))
    assert sorted(t.weights.values()) == [1.0, 2.0]


def test_monotone_function_is_a_single_vertex():
    t = merge_tree_from_samples((range(4), [0.0, 1.0, 2.0, 3.0]))
    assert len(t.vertices) == 1 and t.norm() == 0.0


def test_x_sin_x_has_two_minima():
    f = SampledFunction.from_callable(lambda x: x * np.sin(x), 0.0, 2 * np.pi, 1000)
    t = merge_tree_from_samples(f)
    assert len(t.leaves) == 2
    assert len(t.vertices) == 3
    # the boundary minimum at 0 merges with the interior one at the local max near x = 2.03
    assert min(t.weights.values()) == pytest.approx(1.8197, abs=1e-3)


def test_sampled_function_validation():
    with pytest.raises(ValueError):
        SampledFunction((0.0, 0.0), (1.0, 2.0))
    with pytest.raises(ValueError):
        SampledFunction((0.0,), (1.0,))
    with pytest.raises(ValueError):
        SampledFunction((0.0, 1.0), (1.0, np.nan))


def test_single_linkage_of_three_points():
    t = single_linkage_dendrogram([0.0, 1.0, 3.0])
    assert sorted(t.leaves) == ["p0", "p1", "p2"]
    assert t.weights["p2"] == 2.0
    assert t.weights["p0"] == t.weights["p1"] == 1.0
    assert t.norm() == 5.0


def test_single_linkage_ties_give_one_vertex():
    t = single_linkage_dendrogram([0.0, 1.0, 2.0])
    assert len(t.vertices) == 4 and len(t.children[t.root]) == 3


def test_single_linkage_from_a_distance_matrix():
    d = np.array([[0, 2, 5], [2, 0, 4], [5, 4, 0]], dtype=float)
    t = single_linkage_dendrogram(d, precomputed=True)
    assert t.weights["p2"] == 4.0
    assert sorted(t.weights.values()) == [2.0, 2.0, 2.0, 4.0]
    with pytest.raises(ValueError):
        single_linkage_dendrogram(np.array([[0, 1], [2, 0]]), precomputed=True)
    with pytest.raises(ValueError):
        single_linkage_dendrogram(np.ones((2, 3)), precomputed=True)


def test_single_linkage_of_one_point():
    assert len(single_linkage_dendrogram([[1.0, 2.0]]).vertices) == 1


def test_random_dendrograms_are_binary():
    for seed in range(100):
        t = random_dendrogram(7, seed)
        assert len(t.leaves) == 7
        assert all(len(t.children[v]) == 2 for v in t.vertices if not t.is_leaf(v))


def test_random_dendrograms_are_reproducible():
    assert random_dendrogram(6, 42).canonical_form() == random_dendrogram(6, 42).canonical_form()
    assert random_dendrogram(6, 42).canonical_form() != random_dendrogram(6, 43).canonical_form()
    t = random_dendrogram(5, 1, interval=(10.0, 20.0))
    assert max(t.weights.values()) <= 10.0
    with pytest.raises(ValueError):
        random_dendrogram(0)


def test_benchmark_records_and_csv(tmp_path):
    path = tmp_path / "bench.csv"
    recs = run_benchmark(5, 8, trials=10, seed=3, csv_path=path)
    assert len(recs) == 40
    assert sorted({r.leaves for r in recs}) == [5, 6, 7, 8]
    assert all(r.total_time >= r.solve_time >= 0 for r in recs)
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 40
    assert list(rows[0]) == ["leaves", "trial", "build_time", "solve_time", "total_time", "distance"]
    assert float(rows[0]["distance"]) == pytest.approx(recs[0].distance)


def test_benchmark_distances_match_the_oracle():
    recs = run_benchmark(4, 5, trials=3, seed=9)
    for r in recs:
        seq = np.random.SeedSequence([9, r.leaves]).spawn(3)[r.trial]
        s1, s2 = seq.spawn(2)
        t1, t2 = random_dendrogram(r.leaves, s1), random_dendrogram(r.leaves, s2)
        assert r.distance == pytest.approx(brute_force_tree_distance(t1, t2, max_edges=8), abs=1e-9)


def test_benchmark_is_deterministic_and_parallel_safe():
    a = run_benchmark(5, 6, trials=3, seed=1)
    b = run_benchmark(5, 6, trials=3, seed=1, parallel=True, workers=2)
    assert [r.distance for r in a] == [r.distance for r in b]


def test_benchmark_argument_checks():
    with pytest.raises(ValueError):
        run_benchmark(6, 5)
    with pytest.raises(ValueError):
        run_benchmark(5, 30)
    with pytest.raises(ValueError):
        run_benchmark(5, 6, trials=0)


def test_trend_statistics(tmp_path):
    recs = [BenchmarkRecord(n, k, 0.0, 0.0, n * 0.1 + k * 0.01, 0.0) for n in (5, 6, 7) for k in range(2)]
    assert mean_times(recs) == pytest.approx({5: 0.505, 6: 0.605, 7: 0.705})
    assert time_trend(recs) == pytest.approx(1.0)
    assert np.isnan(time_trend(recs[:2]))
    out = write_benchmark_csv(recs, tmp_path / "r.csv")
    assert out.read_text().count("\n") == 7
