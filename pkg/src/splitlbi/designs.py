"""Builders for structured (X, D) pairs and pairwise-comparison ingestion.

Covers the transforms used throughout: first differences stacked with the
identity (sparse fused signals), grid-graph gradients replicated over colour
channels (image denoising), score-difference designs from paired comparisons
(team ranking), and the all-pairs difference matrix (partial-order grouping).
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import linalg
from .errors import InvalidDimension, InvalidRecord, ParseError


def build_fused_1d(p: int) -> np.ndarray:
    """(2p-1) x p matrix stacking first differences (row j is e_j - e_{j+1})
    on top of the identity."""
    if p < 2:
        raise InvalidDimension(f"fused design needs p >= 2, got {p}")
    diff = np.zeros((p - 1, p))
    idx = np.arange(p - 1)
    diff[idx, idx] = 1.0
    diff[idx, idx + 1] = -1.0
    return np.vstack([diff, np.eye(p)])


def grid_edges(h: int, w: int) -> list[tuple[int, int]]:
    """4-nearest-neighbour edges of an h x w grid, row-major, right edge then
    down edge per pixel, each undirected edge once."""
    edges = []
    for i in range(h):
        for j in range(w):
            a = i * w + j
            if j + 1 < w:
                edges.append((a, a + 1))
            if i + 1 < h:
                edges.append((a, a + w))
    return edges


def build_grid_gradient(h: int, w: int, channels: int = 1) -> np.ndarray:
    """Graph gradient of the h x w grid, block-replicated over channels.

    Each edge (a, b) contributes a row +1 at a, -1 at b; a constant image is
    annihilated. The block layout matches channel-stacked pixel vectors.
    """
    if h < 1 or w < 1 or channels < 1:
        raise InvalidDimension("grid dimensions and channels must be >= 1")
    edges = grid_edges(h, w)
    nv = h * w
    DG = np.zeros((len(edges), nv))
    for r, (a, b) in enumerate(edges):
        DG[r, a] = 1.0
        DG[r, b] = -1.0
    if channels == 1:
        return DG
    D = np.zeros((channels * len(edges), channels * nv))
    for c in range(channels):
        D[c * len(edges) : (c + 1) * len(edges), c * nv : (c + 1) * nv] = DG
    return D


@dataclass(frozen=True)
class ComparisonRecord:
    """One paired comparison: items i and j (1-based) with outcome y
    (a score difference, or +-1 for a preference)."""

    i: int
    j: int
    y: float

    def __post_init__(self):
        if self.i == self.j:
            raise InvalidRecord(f"self-comparison ({self.i}, {self.j})")
        if self.i < 1 or self.j < 1:
            raise InvalidRecord(f"indices must be >= 1, got ({self.i}, {self.j})")


def build_pairwise(
    records: list[ComparisonRecord], p: int, d_from_x_scaled: bool = True
) -> tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Design for item-strength regression from paired comparisons.

    Row k has +1 at item i_k, -1 at item j_k, zero elsewhere; y stacks the
    outcomes. When d_from_x_scaled, D = X / (smallest nonzero singular value
    of X), so the transform's smallest nonzero singular value is 1; otherwise
    D is returned as None and the caller supplies one.
    """
    if not records:
        raise InvalidRecord("need at least one comparison record")
    X = np.zeros((len(records), p))
    y = np.zeros(len(records))
    for k, rec in enumerate(records):
        if rec.i > p or rec.j > p:
            raise InvalidRecord(
                f"record {k}: indices ({rec.i}, {rec.j}) exceed p={p}"
            )
        X[k, rec.i - 1] = 1.0
        X[k, rec.j - 1] = -1.0
        y[k] = rec.y
    D = None
    if d_from_x_scaled:
        f = linalg.compact_svd(X)
        D = X / f.S[-1]
    return X, y, D


def build_complete_graph_tv(p: int) -> np.ndarray:
    """All-pairs difference matrix: one row e_i - e_j per pair i < j, in
    lexicographic order; p(p-1)/2 rows."""
    if p < 2:
        raise InvalidDimension(f"complete-graph design needs p >= 2, got {p}")
    rows = []
    for i in range(p):
        for j in range(i + 1, p):
            r = np.zeros(p)
            r[i] = 1.0
            r[j] = -1.0
            rows.append(r)
    return np.array(rows)


_DESIGN_KINDS = ("identity", "fused1d", "grid_graph", "pairwise", "complete_graph_tv")


@dataclass(frozen=True)
class DesignSpec:
    """Declarative transform builder.

    dims is kind-specific: p for identity/fused1d/complete_graph_tv,
    (h, w, channels) for grid_graph, p for pairwise (which also needs
    records at build time). scale_to_unit rescales so the smallest nonzero
    singular value of D is 1.
    """

    kind: str
    dims: tuple
    scale_to_unit: bool = False

    def __post_init__(self):
        if self.kind not in _DESIGN_KINDS:
            raise InvalidDimension(f"unknown design kind {self.kind!r}")

    def build(self, records: Optional[list[ComparisonRecord]] = None) -> np.ndarray:
        if self.kind == "identity":
            D = np.eye(self.dims[0])
        elif self.kind == "fused1d":
            D = build_fused_1d(self.dims[0])
        elif self.kind == "grid_graph":
            h, w, channels = self.dims
            D = build_grid_gradient(h, w, channels)
        elif self.kind == "complete_graph_tv":
            D = build_complete_graph_tv(self.dims[0])
        else:  # pairwise
            if records is None:
                raise InvalidRecord("pairwise design needs comparison records")
            _, _, D = build_pairwise(records, self.dims[0], d_from_x_scaled=True)
            return D  # already unit-scaled
        if self.scale_to_unit:
            f = linalg.compact_svd(D)
            if f.rank:
                D = D / f.S[-1]
        return D


def extract_groups(
    beta: np.ndarray, tol: float = 1e-9
) -> tuple[list[list[int]], list[tuple[int, int]]]:
    """Partition coordinates into equal-value groups and orient edges.

    Values within tol are merged single-linkage on the sorted sequence.
    Groups are ordered by descending value. The edge list contains (i, j)
    for every coordinate pair in distinct groups with value_i < value_j
    (an arrow toward the stronger item).
    """
    if tol < 0:
        raise InvalidDimension(f"tol must be >= 0, got {tol}")
    beta = np.asarray(beta, dtype=float)
    order = np.argsort(-beta, kind="stable")
    groups: list[list[int]] = []
    last_val = None
    for idx in order:
        v = beta[idx]
        if last_val is None or last_val - v > tol:
            groups.append([int(idx)])
        else:
            groups[-1].append(int(idx))
        last_val = v
    edges = []
    for gi, low_group in enumerate(groups):
        for gj in range(gi):  # groups[gj] has the strictly larger value
            for i in low_group:
                for j in groups[gj]:
                    edges.append((i, j))
    return groups, edges


def ingest_comparisons_csv(path) -> list[ComparisonRecord]:
    """Parse an `i,j,y` CSV of paired comparisons (1-based indices).

    Malformed rows raise ParseError with their line number; an empty data
    section returns an empty list with a warning.
    """
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip().lower() for c in header] != ["i", "j", "y"]:
            raise ParseError(1, f"expected header 'i,j,y', got {header}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(line_no, f"expected 3 fields, got {len(row)}")
            try:
                i, j, y = int(row[0]), int(row[1]), float(row[2])
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from exc
            try:
                records.append(ComparisonRecord(i, j, y))
            except InvalidRecord as exc:
                raise ParseError(line_no, str(exc)) from exc
    if not records:
        warnings.warn(f"no comparison records found in {path}")
    return records
