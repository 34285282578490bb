"""Sparse document-term ingestion (CLUTO-style .mat files) and label files.

The on-disk sparse format is: a header line ``n_rows n_cols nnz`` followed by
one line per row of whitespace-separated ``column value`` pairs with 1-based
column indices. Values are parsed as reals so tf-idf matrices load unchanged.
Malformed input fails loudly with the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dbmca import Partition
from .sphere_core import SparseUnitVector


@dataclass
class SparseMatrix:
    """Raw sparse rows as parsed: (indices, values) pairs, 0-based, sorted."""

    n_rows: int
    n_cols: int
    nnz: int
    rows: list[tuple[np.ndarray, np.ndarray]]


@dataclass
class LabelFile:
    """One class string per document, in file order."""

    labels: list[str]


class ClutoFormatError(ValueError):
    pass


def read_cluto_matrix(path) -> SparseMatrix:
    """Parse a CLUTO sparse matrix file, validating indices and nnz."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ClutoFormatError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 3:
        raise ClutoFormatError(f"{path}:1: header must be 'n_rows n_cols nnz'")
    try:
        n_rows, n_cols, nnz = (int(tok) for tok in header)
    except ValueError:
        raise ClutoFormatError(f"{path}:1: non-integer header fields") from None
    if n_rows < 0 or n_cols < 0 or nnz < 0:
        raise ClutoFormatError(f"{path}:1: negative header fields")
    if len(lines) - 1 != n_rows:
        raise ClutoFormatError(
            f"{path}: header declares {n_rows} rows but file has {len(lines) - 1}"
        )
    rows: list[tuple[np.ndarray, np.ndarray]] = []
    seen = 0
    for r in range(n_rows):
        lineno = r + 2
        tokens = lines[r + 1].split()
        if len(tokens) % 2 != 0:
            raise ClutoFormatError(f"{path}:{lineno}: odd token count (dangling column or value)")
        idx = np.empty(len(tokens) // 2, dtype=np.int64)
        val = np.empty(len(tokens) // 2, dtype=np.float64)
        for e in range(idx.size):
            try:
                col = int(tokens[2 * e])
                val[e] = float(tokens[2 * e + 1])
            except ValueError:
                raise ClutoFormatError(f"{path}:{lineno}: malformed entry {tokens[2 * e:2 * e + 2]}") from None
            if not 1 <= col <= n_cols:
                raise ClutoFormatError(f"{path}:{lineno}: column {col} out of range 1..{n_cols}")
            idx[e] = col - 1
        order = np.argsort(idx, kind="stable")
        idx = idx[order]
        val = val[order]
        if idx.size > 1 and np.any(np.diff(idx) == 0):
            raise ClutoFormatError(f"{path}:{lineno}: duplicate column index")
        rows.append((idx, val))
        seen += idx.size
    if seen != nnz:
        raise ClutoFormatError(f"{path}: header declares nnz={nnz} but file stores {seen}")
    return SparseMatrix(n_rows, n_cols, nnz, rows)


def write_cluto_matrix(path, m: SparseMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{m.n_rows} {m.n_cols} {m.nnz}\n")
        for idx, val in m.rows:
            fh.write(" ".join(f"{i + 1} {v:.12g}" for i, v in zip(idx, val)))
            fh.write("\n")


def normalize_rows(m: SparseMatrix) -> list[SparseUnitVector]:
    """L2-normalize each row into a SparseUnitVector, preserving sparsity."""
    out = []
    for r, (idx, val) in enumerate(m.rows):
        nrm = float(np.linalg.norm(val))
        if idx.size == 0 or nrm == 0.0:
            raise ValueError(f"document {r} is all-zero and cannot be normalized")
        out.append(SparseUnitVector(m.n_cols, idx, val / nrm))
    return out


def normalized_csr(m: SparseMatrix) -> sp.csr_matrix:
    """The matrix as unit-norm CSR rows, ready for clustering."""
    indptr = np.zeros(m.n_rows + 1, dtype=np.int64)
    for r, (idx, _) in enumerate(m.rows):
        if idx.size == 0:
            raise ValueError(f"document {r} is all-zero and cannot be normalized")
        indptr[r + 1] = indptr[r] + idx.size
    indices = np.concatenate([idx for idx, _ in m.rows]) if m.nnz else np.empty(0, np.int64)
    data = np.concatenate([val for _, val in m.rows]) if m.nnz else np.empty(0, np.float64)
    X = sp.csr_matrix((data, indices, indptr), shape=(m.n_rows, m.n_cols))
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    return sp.diags(1.0 / norms) @ X


def zero_fraction(m: SparseMatrix) -> float:
    return 1.0 - m.nnz / (m.n_rows * m.n_cols)


def read_labels(path, n: int) -> tuple[LabelFile, Partition]:
    """Read n class strings (one per line); ids follow first appearance."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.strip() for line in fh.read().splitlines()]
    lines = [line for line in lines if line]
    if len(lines) != n:
        raise ValueError(f"{path}: expected {n} non-empty label lines, found {len(lines)}")
    ids: dict[str, int] = {}
    labels = np.empty(n, dtype=np.int64)
    for i, name in enumerate(lines):
        if name not in ids:
            ids[name] = len(ids)
        labels[i] = ids[name]
    return LabelFile(lines), Partition(labels, len(ids))


def class_frequencies(label_file: LabelFile) -> list[tuple[str, int, float]]:
    """Per-class (name, count, proportion) in first-appearance order."""
    order: dict[str, int] = {}
    for name in label_file.labels:
        order[name] = order.get(name, 0) + 1
    n = len(label_file.labels)
    return [(name, count, count / n) for name, count in order.items()]
