"""Factorial simulation harness for the clustering study.

Crosses number of clusters (2-5), dimension (3, 5, 10), noise level
(low/medium/high concentration bands) and structured vs unstructured center
placement, with 10 replicates per cell and 500 points per dataset: 720
datasets total. Each dataset is clustered with model selection over k and
scored by ARI against the generating partition; results stream to CSV.

Every cell derives its own RNG from (master_seed, cell coordinates), so any
subset of the design reproduces the full run's datasets exactly and cells can
run in parallel with deterministic output order.
"""

from __future__ import annotations

import csv
import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import vmf
from .dbmca import Partition, select_k
from .depth import DepthKind
from .validation import adjusted_rand_index

SAMPLE_SIZE = 500
N_CLUSTERS_LEVELS = (2, 3, 4, 5)
DIM_LEVELS = (3, 5, 10)
REPLICATES = 10

RESULT_COLUMNS = [
    "cell_id",
    "n_clusters",
    "dim",
    "noise",
    "structured",
    "replicate",
    "depth_kind",
    "selected_k",
    "ari_selected",
    "ari_true_k",
    "mean_silhouette",
    "runtime_ms",
    "error",
]

PER_K_COLUMNS = ["cell_id", "depth_kind", "k", "mean_silhouette", "ari"]


class NoiseLevel(str, enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"

    @property
    def kappa_range(self) -> tuple[float, float]:
        return {"low": (10.0, 12.0), "medium": (6.0, 8.0), "high": (2.0, 4.0)}[self.value]


@dataclass(frozen=True)
class SimCell:
    """One cell-replicate of the factorial design."""

    n_clusters: int
    dim: int
    noise: NoiseLevel
    structured: bool
    replicate: int
    sample_size: int = SAMPLE_SIZE

    def __post_init__(self):
        if self.n_clusters not in N_CLUSTERS_LEVELS:
            raise ValueError(f"n_clusters must be one of {N_CLUSTERS_LEVELS}")
        if self.dim not in DIM_LEVELS:
            raise ValueError(f"dim must be one of {DIM_LEVELS}")
        if not isinstance(self.noise, NoiseLevel):
            object.__setattr__(self, "noise", NoiseLevel(self.noise))
        if not 0 <= self.replicate < REPLICATES:
            raise ValueError(f"replicate must lie in [0, {REPLICATES})")
        if self.sample_size < self.n_clusters:
            raise ValueError("sample_size must be at least n_clusters")

    @property
    def cell_id(self) -> str:
        struct = "structured" if self.structured else "unstructured"
        return f"k{self.n_clusters}_d{self.dim}_{self.noise.value}_{struct}_r{self.replicate}"


@dataclass
class SimDataset:
    points: np.ndarray
    true_labels: Partition
    centers: np.ndarray
    kappas: np.ndarray


@dataclass
class SimResult:
    cell: SimCell
    kind: DepthKind
    selected_k: int = 0
    ari_selected: float = float("nan")
    ari_true_k: float = float("nan")
    mean_silhouette: float = float("nan")
    runtime_ms: int = 0
    error: str = ""
    per_k: list[tuple[int, float, float]] = field(default_factory=list, repr=False)


def full_design(sample_size: int = SAMPLE_SIZE) -> list[SimCell]:
    """All 720 cell-replicates in canonical order."""
    cells = []
    for n_clusters in N_CLUSTERS_LEVELS:
        for dim in DIM_LEVELS:
            for noise in NoiseLevel:
                for structured in (True, False):
                    for rep in range(REPLICATES):
                        cells.append(SimCell(n_clusters, dim, noise, structured, rep, sample_size))
    return cells


def draw_kappa(noise: NoiseLevel, seed) -> float:
    """One concentration value, uniform over the noise level's band."""
    lo, hi = NoiseLevel(noise).kappa_range
    rng = np.random.default_rng(seed)
    return float(rng.uniform(lo, hi))


# structured placement: (constraint targets by center position, band of
# admissible cosine distances to every target)
_STRUCTURED_CONSTRAINTS: dict[int, tuple[tuple[int, ...], float, float]] = {
    1: ((0,), 1.7, 2.0),
    2: ((0, 1), 0.8, 1.2),
    3: ((2,), 1.7, 2.0),
    4: ((0, 1, 2, 3), 0.5, 0.8),
}

_TOTAL_DRAW_CAP = 1_000_000
_PER_CENTER_BUDGET = 20_000
_BATCH = 512


def place_structured_centers(k: int, dim: int, seed) -> np.ndarray:
    """Centers satisfying the pairwise cosine-distance bands, by rejection.

    Uniform proposals from the sphere; if a center's budget runs dry the
    whole sequence restarts (later constraints can be jointly infeasible for
    unlucky earlier centers, e.g. a nearly antipodal first pair leaves no
    room for the fifth center). Exceeding the total draw cap raises.
    """
    if k not in (2, 3, 4, 5):
        raise ValueError("structured placement is defined for k in 2..5")
    if dim < 2:
        raise ValueError("dimension must be >= 2")
    rng = np.random.default_rng(seed)
    total_draws = 0
    while total_draws < _TOTAL_DRAW_CAP:
        centers = [vmf.uniform_sphere(1, dim, rng)[0]]
        total_draws += 1
        failed = False
        for pos in range(1, k):
            targets, lo, hi = _STRUCTURED_CONSTRAINTS[pos]
            T = np.stack([centers[t] for t in targets])
            found = None
            used = 0
            while used < _PER_CENTER_BUDGET and total_draws < _TOTAL_DRAW_CAP:
                m = min(_BATCH, _PER_CENTER_BUDGET - used, _TOTAL_DRAW_CAP - total_draws)
                C = vmf.uniform_sphere(m, dim, rng)
                used += m
                total_draws += m
                dist = 1.0 - C @ T.T
                ok = np.where(np.all((dist >= lo) & (dist <= hi), axis=1))[0]
                if ok.size:
                    found = C[ok[0]]
                    break
            if found is None:
                failed = True
                break
            centers.append(found)
        if not failed:
            return np.stack(centers)
    raise RuntimeError(
        f"structured center placement infeasible after {_TOTAL_DRAW_CAP} draws (k={k}, dim={dim})"
    )


def place_unstructured_centers(k: int, dim: int, seed) -> np.ndarray:
    """k centers drawn uniformly (vMF with zero concentration), unconstrained."""
    if k < 1:
        raise ValueError("need k >= 1 centers")
    return vmf.uniform_sphere(k, dim, seed)


def _noise_index(noise: NoiseLevel) -> int:
    return list(NoiseLevel).index(NoiseLevel(noise))


def cell_rng(cell: SimCell, master_seed: int) -> np.random.Generator:
    """Per-cell generator derived from the master seed and cell coordinates."""
    return np.random.default_rng(
        [
            int(master_seed),
            cell.n_clusters,
            cell.dim,
            _noise_index(cell.noise),
            int(cell.structured),
            cell.replicate,
        ]
    )


def _proportions_to_counts(props: np.ndarray, n: int) -> np.ndarray:
    counts = np.floor(props * n).astype(np.int64)
    frac = props * n - counts
    short = n - int(counts.sum())
    if short > 0:
        bump = np.argsort(-frac, kind="stable")[:short]
        counts[bump] += 1
    return counts


def generate_dataset(cell: SimCell, master_seed: int = 0) -> SimDataset:
    """Sample one dataset for a design cell, deterministic in (seed, cell).

    Cluster proportions come from a symmetric Dirichlet(5), redrawn until the
    smallest realized share is at least 0.5/K; each cluster gets an
    independent concentration draw from the cell's noise band.
    """
    rng = cell_rng(cell, master_seed)
    k = cell.n_clusters
    n = cell.sample_size
    if cell.structured:
        centers = place_structured_centers(k, cell.dim, rng)
    else:
        centers = place_unstructured_centers(k, cell.dim, rng)
    kappas = np.array([draw_kappa(cell.noise, rng) for _ in range(k)])
    floor = 0.5 / k
    while True:
        props = rng.dirichlet(np.full(k, 5.0))
        counts = _proportions_to_counts(props, n)
        if counts.min() / n >= floor:
            break
    blocks = [
        vmf.sample(vmf.VmfParams(centers[j], kappas[j]), int(counts[j]), rng)
        for j in range(k)
    ]
    points = np.vstack(blocks)
    labels = np.repeat(np.arange(k), counts)
    return SimDataset(points, Partition(labels, k), centers, kappas)


def _run_cell(args) -> list[SimResult]:
    cell, kinds, master_seed, ks, restarts, seeding = args
    try:
        ds = generate_dataset(cell, master_seed)
    except Exception as exc:  # noqa: BLE001 - a failed cell must not kill the sweep
        return [SimResult(cell, kind, error=f"generate: {exc}") for kind in kinds]
    results = []
    for kind in kinds:
        t0 = time.perf_counter()
        res = SimResult(cell, kind)
        try:
            seed = (
                int(master_seed),
                cell.n_clusters,
                cell.dim,
                _noise_index(cell.noise),
                int(cell.structured),
                cell.replicate,
                kind.code,
            )
            best_k, models = select_k(ds.points, kind, ks, restarts, seed, seeding=seeding)
            by_k = {m.partition.n_clusters: m for m in models}
            truth = ds.true_labels.labels
            best = by_k[best_k]
            res.selected_k = best_k
            res.ari_selected = adjusted_rand_index(best.partition.labels, truth)
            res.mean_silhouette = best.silhouette
            if cell.n_clusters in by_k:
                res.ari_true_k = adjusted_rand_index(by_k[cell.n_clusters].partition.labels, truth)
            res.per_k = [
                (m.partition.n_clusters, m.silhouette, adjusted_rand_index(m.partition.labels, truth))
                for m in models
            ]
        except Exception as exc:  # noqa: BLE001
            res.error = f"cluster: {exc}"
        res.runtime_ms = int(round((time.perf_counter() - t0) * 1000.0))
        results.append(res)
    return results


def _fmt(v: float) -> str:
    return "%.6f" % v


def write_results_csv(out_path, results: list[SimResult], header_lines=(), *, timing: bool = True) -> None:
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for r in results:
            writer.writerow(
                [
                    r.cell.cell_id,
                    r.cell.n_clusters,
                    r.cell.dim,
                    r.cell.noise.value,
                    str(r.cell.structured).lower(),
                    r.cell.replicate,
                    r.kind.value,
                    r.selected_k,
                    _fmt(r.ari_selected),
                    _fmt(r.ari_true_k),
                    _fmt(r.mean_silhouette),
                    r.runtime_ms if timing else 0,
                    r.error,
                ]
            )


def write_per_k_csv(out_path, results: list[SimResult], header_lines=()) -> None:
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PER_K_COLUMNS)
        for r in results:
            for k, sil, ari in r.per_k:
                writer.writerow([r.cell.cell_id, r.kind.value, k, _fmt(sil), _fmt(ari)])


def run_study(
    design: list[SimCell],
    kinds: list[DepthKind],
    out_path,
    master_seed: int = 0,
    workers: int = 1,
    *,
    k_range=range(2, 11),
    restarts: int = 10,
    seeding: str = "similarity",
    timing: bool = True,
    per_k_path=None,
    header_lines=(),
) -> list[SimResult]:
    """Cluster every (cell, kind) and stream results to CSV.

    Cells are independent jobs; with ``workers > 1`` they run in a process
    pool, and results are written in design order regardless of completion
    order. Per-cell failures become rows with the error column set. With
    ``timing=False`` the runtime column is written as 0 so that two runs with
    the same master seed produce byte-identical files.
    """
    if not design:
        raise ValueError("design must be non-empty")
    if not kinds:
        raise ValueError("need at least one depth kind")
    ks = list(k_range)
    jobs = [(cell, tuple(kinds), int(master_seed), tuple(ks), int(restarts), seeding) for cell in design]
    results: list[SimResult] = []
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            for rows in pool.map(_run_cell, jobs, chunksize=4):
                results.extend(rows)
    else:
        for job in jobs:
            results.extend(_run_cell(job))
    if out_path is not None:
        write_results_csv(out_path, results, header_lines, timing=timing)
    if per_k_path is not None:
        write_per_k_csv(per_k_path, results, header_lines)
    return results
