"""Command-line surface: generate, depth, cluster, select-k, validate,
simulate, ingest-report.

Every run is deterministic given its flags (``--seed`` falls back to the
``SPHEREDEPTH_SEED`` environment variable, then 0), and every output starts
with comment lines echoing the tool version and the resolved configuration.
Exit codes: 0 success, 2 usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, ingest, simharness, vmf
from .dbmca import fit, select_k, silhouette, spherical_kmeans
from .depth import DepthKind, alpha_region, as_sample, sample_depths
from .sphere_core import normalize
from .validation import (
    aci,
    adjusted_rand_index,
    membership_matrix,
    ndc,
    one_hot,
    rand_index,
)


class UsageError(Exception):
    pass


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("SPHEREDEPTH_SEED", "").strip()
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SPHEREDEPTH_SEED is not an integer: {env!r}") from None
    return 0


def _header_lines(args: argparse.Namespace) -> list[str]:
    skip = {"func"}
    parts = [f"{k}={getattr(args, k)}" for k in sorted(vars(args)) if k not in skip]
    return [f"spheredepth {__version__}", "config: " + " ".join(parts)]


def _emit(path, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _comment(lines: list[str]) -> list[str]:
    return [f"# {line}" for line in lines]


def _looks_like_cluto(path) -> bool:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if not ln.lstrip().startswith("#")]
    except OSError:
        return False
    if not lines:
        return False
    head = lines[0].split()
    if len(head) != 3 or not all(tok.isdigit() for tok in head):
        return False
    return int(head[0]) == len(lines) - 1


def _load_dense(path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except ValueError:
        return np.loadtxt(path, comments="#", ndmin=2)


def _load_points(path, fmt: str):
    if fmt == "cluto" or (fmt == "auto" and _looks_like_cluto(path)):
        return ingest.normalized_csr(ingest.read_cluto_matrix(path))
    return as_sample(_load_dense(path))


def _depth_kind(name: str) -> DepthKind:
    try:
        return DepthKind(name)
    except ValueError:
        raise UsageError(f"unknown depth kind {name!r} (use arc, cosine or chord)") from None


def _parse_k_range(text: str) -> range:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--k-range must look like 'lo:hi', got {text!r}") from None
    if lo > hi:
        raise UsageError(f"--k-range is empty: {text!r}")
    if lo < 2:
        raise UsageError("--k-range must start at 2 or above (silhouette is undefined at k=1)")
    return range(lo, hi + 1)


def _write_points(path, X: np.ndarray, header: list[str]) -> None:
    lines = _comment(header) + [",".join("%.17g" % v for v in row) for row in X]
    _emit(path, lines)


def _write_labels(path, labels: np.ndarray, header: list[str]) -> None:
    _emit(path, _comment(header) + [str(int(v)) for v in labels])


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def _cmd_generate(args) -> None:
    seed = _resolve_seed(args.seed)
    header = _header_lines(args)
    if args.mode == "vmf":
        if args.kappa < 0:
            raise UsageError("--kappa must be >= 0")
        if args.n < 1:
            raise UsageError("--n must be >= 1")
        if args.mu is not None:
            mu = np.array([float(tok) for tok in args.mu.split(",")])
            if mu.size != args.d:
                raise UsageError(f"--mu has {mu.size} coordinates, expected {args.d}")
            mu = normalize(mu)
        else:
            mu = np.zeros(args.d)
            mu[-1] = 1.0
        X = vmf.sample(vmf.VmfParams(mu, args.kappa), args.n, seed)
        labels = np.zeros(args.n, dtype=np.int64)
    else:  # cell
        cell = simharness.SimCell(
            n_clusters=args.clusters,
            dim=args.dim,
            noise=simharness.NoiseLevel(args.noise),
            structured=args.structured,
            replicate=0,
            sample_size=args.sample_size,
        )
        ds = simharness.generate_dataset(cell, seed)
        X = ds.points
        labels = ds.true_labels.labels
    _write_points(args.out, X, header)
    labels_out = args.labels_out
    if labels_out is None and args.out not in (None, "-"):
        labels_out = str(args.out) + ".labels.csv"
    if labels_out is not None:
        _write_labels(labels_out, labels, header)


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------

def _cmd_depth(args) -> None:
    kind = _depth_kind(args.depth)
    X = _load_points(args.input, args.format)
    depths = sample_depths(X, kind)
    header = _header_lines(args)
    if args.alpha is not None:
        region = alpha_region(X, kind, args.alpha)
        members = set(region.member_indices.tolist())
        rows = ["index,depth,in_region"] + [
            f"{i},{d:.12g},{int(i in members)}" for i, d in enumerate(depths)
        ]
    else:
        rows = ["index,depth"] + [f"{i},{d:.12g}" for i, d in enumerate(depths)]
    _emit(args.out, _comment(header) + rows)


# ---------------------------------------------------------------------------
# cluster / select-k
# ---------------------------------------------------------------------------

def _best_of_restarts(X, kind, k, seed, restarts, max_iter, seeding):
    best = None
    for r in range(restarts):
        m = fit(X, kind, k, (seed, k, r), max_iter=max_iter, seeding=seeding)
        if best is None or m.objective_trace[-1] > best.objective_trace[-1]:
            best = m
    return best


def _cmd_cluster(args) -> None:
    if (args.k is None) == (args.k_range is None):
        raise UsageError("provide exactly one of --k and --k-range")
    kind = _depth_kind(args.depth)
    seed = _resolve_seed(args.seed)
    X = _load_points(args.input, args.format)
    n = X.shape[0]
    header = _header_lines(args)
    extra: list[str] = []
    if args.method == "dbmca":
        if args.k_range is not None:
            ks = _parse_k_range(args.k_range)
            best_k, models = select_k(
                X, kind, ks, args.restarts, seed, max_iter=args.max_iter, seeding=args.seeding
            )
            model = models[sorted(set(ks)).index(best_k)]
            extra.append("selected_k=%d" % best_k)
            extra.append(
                "silhouette_by_k="
                + " ".join(f"{m.partition.n_clusters}:{m.silhouette:.6f}" for m in models)
            )
        else:
            if not 1 <= args.k <= n:
                raise UsageError(f"--k must lie in [1, {n}]")
            model = _best_of_restarts(X, kind, args.k, seed, args.restarts, args.max_iter, args.seeding)
        labels = model.partition.labels
        extra.append("medoid_indices=" + " ".join(str(int(i)) for i in model.medoid_indices))
        extra.append("iterations=%d converged=%s" % (model.iterations, str(model.converged).lower()))
        extra.append("objective_trace=" + " ".join("%.6f" % v for v in model.objective_trace))
        extra.append("mean_silhouette=%.6f" % model.silhouette)
        per_point = (
            silhouette(X, model.partition, kind).per_point
            if model.partition.n_clusters >= 2
            else np.zeros(n)
        )
    else:  # skmeans
        if args.k_range is not None:
            ks = sorted(set(_parse_k_range(args.k_range)))
            scored = []
            for k in ks:
                part = spherical_kmeans(X, k, (seed, k), max_iter=args.max_iter)
                sil = silhouette(X, part, kind).mean if k >= 2 else float("nan")
                scored.append((k, part, sil))
            best_k, part, sil = max(scored, key=lambda t: (t[2], -t[0]))
            extra.append("selected_k=%d" % best_k)
            extra.append("silhouette_by_k=" + " ".join(f"{k}:{s:.6f}" for k, _, s in scored))
        else:
            if not 1 <= args.k <= n:
                raise UsageError(f"--k must lie in [1, {n}]")
            part = spherical_kmeans(X, args.k, seed, max_iter=args.max_iter)
            sil = silhouette(X, part, kind).mean if args.k >= 2 else float("nan")
        labels = part.labels
        extra.append("mean_silhouette=%.6f" % sil)
        per_point = silhouette(X, part, kind).per_point if part.n_clusters >= 2 else np.zeros(n)
    _write_labels(args.out, labels, header + extra)
    if args.silhouette_out is not None:
        _emit(
            args.silhouette_out,
            _comment(header) + ["index,silhouette"] + [f"{i},{s:.12g}" for i, s in enumerate(per_point)],
        )


def _cmd_select_k(args) -> None:
    kind = _depth_kind(args.depth)
    seed = _resolve_seed(args.seed)
    X = _load_points(args.input, args.format)
    ks = _parse_k_range(args.k_range)
    best_k, models = select_k(
        X, kind, ks, args.restarts, seed, max_iter=args.max_iter, seeding=args.seeding
    )
    header = _header_lines(args) + ["selected_k=%d" % best_k]
    rows = ["k,mean_silhouette,objective,selected"]
    for m in models:
        k = m.partition.n_clusters
        rows.append(f"{k},{m.silhouette:.6f},{m.objective_trace[-1]:.6f},{int(k == best_k)}")
    _emit(args.out, _comment(header) + rows)


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _load_partition_file(path):
    """Crisp label file (one token per line) or membership CSV (n x K floats)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh.read().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no data lines")
    if "," in lines[0]:
        W = np.array([[float(tok) for tok in ln.split(",")] for ln in lines])
        if W.ndim == 2 and W.shape[1] >= 2:
            return "fuzzy", membership_matrix(W)
        W = W.ravel()
        return "crisp", _strings_to_ids([str(v) for v in W])
    return "crisp", _strings_to_ids(lines)


def _strings_to_ids(tokens: list[str]) -> np.ndarray:
    ids: dict[str, int] = {}
    out = np.empty(len(tokens), dtype=np.int64)
    for i, tok in enumerate(tokens):
        if tok not in ids:
            ids[tok] = len(ids)
        out[i] = ids[tok]
    return out


def _cmd_validate(args) -> None:
    kind_a, part_a = _load_partition_file(args.a)
    kind_b, part_b = _load_partition_file(args.b)
    n_a = part_a.shape[0]
    n_b = part_b.shape[0]
    if n_a != n_b:
        raise UsageError(f"partition lengths differ: {n_a} vs {n_b}")
    rows = ["metric,value"]
    if kind_a == "crisp" and kind_b == "crisp":
        rows.append("ri,%.6f" % rand_index(part_a, part_b))
        rows.append("ari,%.6f" % adjusted_rand_index(part_a, part_b))
    else:
        G = one_hot(part_a) if kind_a == "crisp" else part_a
        H = one_hot(part_b) if kind_b == "crisp" else part_b
        rows.append("ndc,%.6f" % ndc(G, H))
        rows.append("aci,%.6f" % aci(G, H, args.n_perm, _resolve_seed(args.seed)))
    _emit(args.out, _comment(_header_lines(args)) + rows)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

_FILTER_KEYS = {"clusters", "dim", "noise", "structured", "replicate"}


def _parse_filter(text: str | None):
    if not text:
        return {}
    out = {}
    for term in text.split(","):
        if "=" not in term:
            raise UsageError(f"bad filter term {term!r} (expected key=value)")
        key, value = (tok.strip() for tok in term.split("=", 1))
        if key not in _FILTER_KEYS:
            raise UsageError(f"unknown filter key {key!r} (known: {sorted(_FILTER_KEYS)})")
        out[key] = value
    return out


def _apply_filter(cells, flt):
    def keep(cell: simharness.SimCell) -> bool:
        if "clusters" in flt and cell.n_clusters != int(flt["clusters"]):
            return False
        if "dim" in flt and cell.dim != int(flt["dim"]):
            return False
        if "noise" in flt and cell.noise != simharness.NoiseLevel(flt["noise"]):
            return False
        if "structured" in flt and cell.structured != (flt["structured"].lower() in ("1", "true", "yes")):
            return False
        if "replicate" in flt and cell.replicate != int(flt["replicate"]):
            return False
        return True

    return [c for c in cells if keep(c)]


def _cmd_simulate(args) -> None:
    kinds = [_depth_kind(tok.strip()) for tok in args.depths.split(",") if tok.strip()]
    if not kinds:
        raise UsageError("--depths must name at least one depth kind")
    design = _apply_filter(simharness.full_design(args.sample_size), _parse_filter(args.filter))
    if not design:
        raise UsageError("the filter matches no design cells")
    master_seed = _resolve_seed(args.master_seed)
    simharness.run_study(
        design,
        kinds,
        args.out,
        master_seed=master_seed,
        workers=args.workers,
        k_range=_parse_k_range(args.k_range),
        restarts=args.restarts,
        seeding=args.seeding,
        timing=not args.no_timing,
        per_k_path=args.per_k,
        header_lines=_header_lines(args),
    )


# ---------------------------------------------------------------------------
# ingest-report
# ---------------------------------------------------------------------------

def _cmd_ingest_report(args) -> None:
    m = ingest.read_cluto_matrix(args.matrix)
    header = _header_lines(args)
    header.append(f"matrix: rows={m.n_rows} cols={m.n_cols} nnz={m.nnz}")
    header.append("zero_fraction=%.6f" % ingest.zero_fraction(m))
    rows = ["class,count,proportion"]
    if args.labels is not None:
        label_file, _ = ingest.read_labels(args.labels, m.n_rows)
        for name, count, prop in ingest.class_frequencies(label_file):
            rows.append(f"{name},{count},{prop:.6f}")
    _emit(args.out, _comment(header) + rows)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spheredepth",
        description="Depth-based clustering of directional data on the unit hypersphere.",
    )
    parser.add_argument("--version", action="version", version=f"spheredepth {__version__}")
    sub = parser.add_subparsers(dest="command")

    gen = sub.add_parser("generate", help="generate unit-sphere datasets")
    gen_sub = gen.add_subparsers(dest="mode", required=True)
    gv = gen_sub.add_parser("vmf", help="one von Mises-Fisher cloud")
    gv.add_argument("--d", type=int, required=True, help="ambient dimension (>= 2)")
    gv.add_argument("--kappa", type=float, required=True, help="concentration (>= 0)")
    gv.add_argument("--n", type=int, required=True, help="number of points")
    gv.add_argument("--mu", type=str, default=None, help="mean direction as comma floats (default: last axis)")
    gv.add_argument("--seed", type=int, default=None)
    gv.add_argument("--out", type=str, default="-", help="points CSV ('-' = stdout)")
    gv.add_argument("--labels-out", type=str, default=None)
    gv.set_defaults(func=_cmd_generate)
    gc = gen_sub.add_parser("cell", help="one factorial-design cell dataset")
    gc.add_argument("--clusters", type=int, required=True, choices=(2, 3, 4, 5))
    gc.add_argument("--dim", type=int, required=True, choices=(3, 5, 10))
    gc.add_argument("--noise", type=str, required=True, choices=[n.value for n in simharness.NoiseLevel])
    struct = gc.add_mutually_exclusive_group(required=True)
    struct.add_argument("--structured", dest="structured", action="store_true")
    struct.add_argument("--unstructured", dest="structured", action="store_false")
    gc.add_argument("--sample-size", type=int, default=simharness.SAMPLE_SIZE)
    gc.add_argument("--seed", type=int, default=None)
    gc.add_argument("--out", type=str, default="-")
    gc.add_argument("--labels-out", type=str, default=None)
    gc.set_defaults(func=_cmd_generate)

    dep = sub.add_parser("depth", help="per-point depth of a sample")
    dep.add_argument("--input", type=str, required=True)
    dep.add_argument("--format", type=str, default="auto", choices=("auto", "dense", "cluto"))
    dep.add_argument("--depth", type=str, default="cosine")
    dep.add_argument("--alpha", type=float, default=None, help="also report alpha-region membership")
    dep.add_argument("--out", type=str, default="-")
    dep.set_defaults(func=_cmd_depth)

    clu = sub.add_parser("cluster", help="cluster a dataset")
    clu.add_argument("--input", type=str, required=True)
    clu.add_argument("--format", type=str, default="auto", choices=("auto", "dense", "cluto"))
    clu.add_argument("--method", type=str, default="dbmca", choices=("dbmca", "skmeans"))
    clu.add_argument("--depth", type=str, default="cosine")
    clu.add_argument("--k", type=int, default=None)
    clu.add_argument("--k-range", type=str, default=None, help="e.g. 2:10 (selects k by silhouette)")
    clu.add_argument("--seed", type=int, default=None)
    clu.add_argument("--restarts", type=int, default=10)
    clu.add_argument("--max-iter", type=int, default=100)
    clu.add_argument("--seeding", type=str, default="similarity", choices=("similarity", "spread"))
    clu.add_argument("--out", type=str, default="-", help="labels output")
    clu.add_argument("--silhouette-out", type=str, default=None)
    clu.set_defaults(func=_cmd_cluster)

    sel = sub.add_parser("select-k", help="silhouette curve over a k range")
    sel.add_argument("--input", type=str, required=True)
    sel.add_argument("--format", type=str, default="auto", choices=("auto", "dense", "cluto"))
    sel.add_argument("--depth", type=str, default="cosine")
    sel.add_argument("--k-range", type=str, default="2:10")
    sel.add_argument("--seed", type=int, default=None)
    sel.add_argument("--restarts", type=int, default=10)
    sel.add_argument("--max-iter", type=int, default=100)
    sel.add_argument("--seeding", type=str, default="similarity", choices=("similarity", "spread"))
    sel.add_argument("--out", type=str, default="-")
    sel.set_defaults(func=_cmd_select_k)

    val = sub.add_parser("validate", help="agreement indices between two partitions")
    val.add_argument("a", type=str, help="label file or membership CSV")
    val.add_argument("b", type=str, help="label file or membership CSV")
    val.add_argument("--n-perm", type=int, default=1000)
    val.add_argument("--seed", type=int, default=None)
    val.add_argument("--out", type=str, default="-")
    val.set_defaults(func=_cmd_validate)

    sim = sub.add_parser("simulate", help="run the factorial simulation study")
    sim.add_argument("--filter", type=str, default=None, help="e.g. dim=3,noise=low,clusters=2,structured=true")
    sim.add_argument("--depths", type=str, default="cosine,arc,chord")
    sim.add_argument("--master-seed", type=int, default=None)
    sim.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sim.add_argument("--k-range", type=str, default="2:10")
    sim.add_argument("--restarts", type=int, default=10)
    sim.add_argument("--seeding", type=str, default="similarity", choices=("similarity", "spread"))
    sim.add_argument("--sample-size", type=int, default=simharness.SAMPLE_SIZE)
    sim.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 for byte-reproducible output")
    sim.add_argument("--out", type=str, required=True)
    sim.add_argument("--per-k", type=str, default=None, help="long-form per-k CSV")
    sim.set_defaults(func=_cmd_simulate)

    ing = sub.add_parser("ingest-report", help="summarize a CLUTO matrix and labels")
    ing.add_argument("--matrix", type=str, required=True)
    ing.add_argument("--labels", type=str, default=None)
    ing.add_argument("--out", type=str, default="-")
    ing.set_defaults(func=_cmd_ingest_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
