"""Command line interface: ``editdist <command> ...``.

Trees are read from the JSON format of :meth:`Dendrogram.to_json` (or from
Newick when the file ends in ``.nwk``/``.newick``).  Results go to stdout as
JSON unless ``-o`` is given.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .dendrogram import Dendrogram, parse_newick
from .engine import compute_distance, distance_matrix
from .ingest import (
    BenchmarkRecord,
    SampledFunction,
    merge_tree_from_samples,
    random_dendrogram,
    run_benchmark,
    single_linkage_dendrogram,
    time_trend,
    write_benchmark_csv,
)
from .mapping import TreeMapping, tree_mapping_cost, validate_tree_mapping

log = logging.getLogger("editdist")


def load_tree(path: str | Path) -> Dendrogram:
    path = Path(path)
    text = path.read_text()
    if path.suffix in (".nwk", ".newick"):
        return parse_newick(text)
    return Dendrogram.from_json(json.loads(text))


def _read_rows(path: str | Path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            cells = [c.strip() for c in row if c.strip()]
            if not cells or cells[0].startswith("#"):
                continue
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if rows:
                    raise
                continue  # header line
    if not rows:
        raise ValueError(f"{path}: no numeric rows")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have different lengths")
    return np.array(rows, dtype=float)


def _emit(payload, out: str | None) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_dist(args) -> dict:
    t1, t2 = load_tree(args.a), load_tree(args.b)
    value, table = compute_distance(t1, t2, workers=args.workers, lp_dir=args.lp_dir)
    return {
        "distance": value,
        "problems": table.problems,
        "variables": table.variables,
        "build_time": table.build_time,
        "solve_time": table.solve_time,
    }


def cmd_matrix(args) -> dict:
    files = sorted(p for p in Path(args.directory).iterdir() if p.suffix in (".json", ".nwk", ".newick"))
    if not files:
        raise ValueError(f"no tree files in {args.directory}")
    trees = [load_tree(p) for p in files]
    mat = distance_matrix(trees, workers=args.workers)
    return {"names": [p.name for p in files], "matrix": mat.tolist()}


def cmd_mergetree(args) -> dict:
    data = _read_rows(args.samples)
    if data.shape[1] != 2:
        raise ValueError("samples CSV must have two columns x,y")
    return merge_tree_from_samples(SampledFunction(tuple(data[:, 0]), tuple(data[:, 1]))).to_json()


def cmd_linkage(args) -> dict:
    data = _read_rows(args.points)
    return single_linkage_dendrogram(data, precomputed=args.precomputed).to_json()


def cmd_random(args) -> dict:
    return random_dendrogram(args.leaves, args.seed, (args.low, args.high)).to_json()


def cmd_validate(args) -> dict:
    t1, t2 = load_tree(args.a), load_tree(args.b)
    m = TreeMapping.from_records(json.loads(Path(args.mapping).read_text()))
    problems = validate_tree_mapping(t1, t2, m)
    out = {"valid": not problems, "problems": problems}
    if not problems:
        out["cost"] = tree_mapping_cost(t1, t2, m)
    return out


def cmd_bench(args) -> str:
    records = run_benchmark(
        args.n_min, args.n_max, args.trials, parallel=args.parallel, seed=args.seed, max_leaves=args.max_leaves
    )
    rho = time_trend(records)
    log.info("spearman rank correlation of mean total time with leaf count: %.3f", rho)
    if args.output:
        write_benchmark_csv(records, args.output)
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([f for f in BenchmarkRecord.__dataclass_fields__])
    for r in records:
        writer.writerow([getattr(r, f) for f in BenchmarkRecord.__dataclass_fields__])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="editdist", description="Edit distance between weighted dendrograms.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("-o", "--output", help="write the result here instead of stdout")
        sp.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="log progress to stderr")
        sp.set_defaults(func=func)
        return sp

    sp = add("dist", cmd_dist, "distance between two trees")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--workers", type=int, default=None, help="worker processes (default: EDITDIST_THREADS or 1)")
    sp.add_argument("--lp-dir", default=None, help="dump every subproblem as an LP file into this directory")

    sp = add("matrix", cmd_matrix, "pairwise distances between all trees in a directory")
    sp.add_argument("directory")
    sp.add_argument("--workers", type=int, default=None)

    sp = add("mergetree", cmd_mergetree, "merge tree of sampled function values (CSV rows x,y)")
    sp.add_argument("samples")

    sp = add("linkage", cmd_linkage, "single-linkage dendrogram of points (CSV, one point per row)")
    sp.add_argument("points")
    sp.add_argument("--precomputed", action="store_true", help="input is a square distance matrix")

    sp = add("random", cmd_random, "random single-linkage dendrogram of uniform points")
    sp.add_argument("--leaves", type=int, required=True)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--low", type=float, default=0.0)
    sp.add_argument("--high", type=float, default=1.0)

    sp = add("validate-mapping", cmd_validate, "check a tree mapping and report its cost")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("mapping", help='JSON list of ["couple",v,w] / ["D",side,v] / ["G",side,v]')

    sp = add("bench", cmd_bench, "time distance computations on random pairs, CSV output")
    sp.add_argument("--n-min", type=int, default=5)
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--parallel", action="store_true", help="run pairs in worker processes (EDITDIST_THREADS)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-leaves", type=int, default=20)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        result = args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"editdist: error: {exc}", file=sys.stderr)
        return 2
    if args.command == "bench" and args.output:
        return 0
    _emit(result, args.output)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
