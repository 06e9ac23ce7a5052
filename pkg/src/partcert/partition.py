"""Seeded k-means partitions of the feature space.

The partition realizes the K disjoint cells that the certificate arithmetic
counts samples into.  Lloyd iterations run until the assignment reaches a
fixpoint or ``max_iters`` passes; initialization samples K distinct data
points uniformly without replacement (plain uniform, not k-means++, and
overridable via ``init``).  For a fixed (features, K, seed, max_iters) the
result is bit-identical across runs.

Note that clustering the very sample being certified makes the partition
data-dependent; the guarantee is stated for a partition chosen independently
of the sample.  Quantify the effect with the synthetic harness if it matters
for your use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import CellCounts
from .errors import InvalidInputError

_CHUNK_ELEMS = 4_000_000  # cap on points*K per distance block


@dataclass(frozen=True)
class FeatureTable:
    """Sample ids with an (n, d) matrix of feature vectors."""

    ids: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        ids = tuple(str(s) for s in self.ids)
        vec = np.asarray(self.vectors, dtype=np.float64)
        if vec.ndim != 2 or vec.shape[1] < 1:
            raise InvalidInputError("vectors must be an (n, d) matrix with d >= 1")
        if vec.shape[0] != len(ids):
            raise InvalidInputError("ids and vectors disagree on n")
        if len(set(ids)) != len(ids):
            raise InvalidInputError("duplicate sample ids")
        if vec.size and not np.all(np.isfinite(vec)):
            raise InvalidInputError("feature vectors must be finite")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "vectors", vec)

    def __len__(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True)
class Centroids:
    centers: np.ndarray
    seed: int
    iters_run: int

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] < 1:
            raise InvalidInputError("centers must be a (K, d) matrix")
        if c.size and not np.all(np.isfinite(c)):
            raise InvalidInputError("centers must be finite")
        object.__setattr__(self, "centers", c)

    @property
    def k(self) -> int:
        return self.centers.shape[0]


@dataclass(frozen=True)
class Assignment:
    """Map from sample id to cell index in [0, K)."""

    ids: tuple[str, ...]
    cells: np.ndarray

    def __post_init__(self):
        ids = tuple(str(s) for s in self.ids)
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.ndim != 1 or cells.size != len(ids):
            raise InvalidInputError("ids and cells must be 1-D and of equal length")
        if len(set(ids)) != len(ids):
            raise InvalidInputError("duplicate sample ids")
        if cells.size and cells.min() < 0:
            raise InvalidInputError("cell indices must be nonnegative")
        cells = cells.copy()
        cells.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "cells", cells)

    def __len__(self) -> int:
        return self.cells.size

    def as_dict(self) -> dict[str, int]:
        return {s: int(c) for s, c in zip(self.ids, self.cells)}


def _nearest(points: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per point (ties to the lowest cell index) and the
    squared distance to it, computed in fixed-size blocks."""
    k = centers.shape[0]
    c_sq = np.einsum("kd,kd->k", centers, centers)
    cells = np.empty(points.shape[0], dtype=np.int64)
    min_d2 = np.empty(points.shape[0], dtype=np.float64)
    block = max(1, _CHUNK_ELEMS // max(k, 1))
    for lo in range(0, points.shape[0], block):
        chunk = points[lo : lo + block]
        d2 = chunk @ centers.T
        d2 *= -2.0
        d2 += c_sq[np.newaxis, :]
        d2 += np.einsum("nd,nd->n", chunk, chunk)[:, np.newaxis]
        idx = np.argmin(d2, axis=1)
        cells[lo : lo + block] = idx
        np.maximum(d2[np.arange(chunk.shape[0]), idx], 0.0, out=min_d2[lo : lo + block])
    return cells, min_d2


def fit(
    features: FeatureTable,
    k: int,
    seed: int,
    max_iters: int = 50,
    init: np.ndarray | None = None,
) -> Centroids:
    """Lloyd k-means, deterministic for fixed (features, k, seed, max_iters).

    Empty clusters are re-seeded to the point currently farthest from its own
    centroid (next-farthest for further empties in the same pass), so K
    centroids always exist; cells that end up with zero samples simply drop
    out of the occupied set.  The within-cluster sum of squares is checked to
    be non-increasing at every assignment pass.
    """
    x = features.vectors
    n = x.shape[0]
    if k < 1:
        raise InvalidInputError(f"K must be >= 1, got {k}")
    if k > n:
        raise InvalidInputError(f"K={k} exceeds the number of samples n={n}")
    if max_iters < 1:
        raise InvalidInputError(f"max_iters must be >= 1, got {max_iters}")
    if init is not None:
        centers = np.asarray(init, dtype=np.float64).copy()
        if centers.shape != (k, x.shape[1]):
            raise InvalidInputError("init must have shape (K, d)")
    else:
        rng = np.random.default_rng(seed)
        centers = x[rng.choice(n, size=k, replace=False)].copy()

    prev = None
    wcss_prev = np.inf
    iters_run = 0
    for _ in range(max_iters):
        cells, min_d2 = _nearest(x, centers)
        iters_run += 1
        wcss = float(min_d2.sum())
        if wcss > wcss_prev * (1.0 + 1e-9) + 1e-9:
            raise RuntimeError(
                f"k-means objective increased ({wcss_prev} -> {wcss}); "
                "this indicates an implementation bug"
            )
        wcss_prev = wcss
        if prev is not None and np.array_equal(cells, prev):
            break
        prev = cells

        sizes = np.bincount(cells, minlength=k)
        centers = np.empty_like(centers)
        for j in range(x.shape[1]):
            centers[:, j] = np.bincount(cells, weights=x[:, j], minlength=k)
        nonzero = sizes > 0
        centers[nonzero] /= sizes[nonzero, np.newaxis]
        empty = np.flatnonzero(~nonzero)
        if empty.size:
            donors = np.argsort(-min_d2, kind="stable")[: empty.size]
            centers[empty] = x[donors]
    return Centroids(centers=centers, seed=seed, iters_run=iters_run)


def assign(features: FeatureTable, centroids: Centroids) -> Assignment:
    """Nearest-centroid assignment by Euclidean distance, ties to the lowest
    cell index; deterministic."""
    if features.vectors.shape[1] != centroids.centers.shape[1]:
        raise InvalidInputError(
            f"feature dimension {features.vectors.shape[1]} != centroid "
            f"dimension {centroids.centers.shape[1]}"
        )
    cells, _ = _nearest(features.vectors, centroids.centers)
    return Assignment(ids=features.ids, cells=cells)


def counts(assignment: Assignment, k: int) -> CellCounts:
    """Exact histogram of an assignment over K cells."""
    if k < 1:
        raise InvalidInputError(f"K must be >= 1, got {k}")
    cells = assignment.cells
    if cells.size and int(cells.max()) >= k:
        raise InvalidInputError(
            f"cell index {int(cells.max())} out of range for K={k}"
        )
    return CellCounts(np.bincount(cells, minlength=k))


def cells_for(sample_ids, assignment: Assignment) -> np.ndarray:
    """Cells of the given ids, in the given order."""
    pos = {s: i for i, s in enumerate(assignment.ids)}
    missing = [s for s in sample_ids if s not in pos]
    if missing:
        raise InvalidInputError(f"no assignment for id {missing[0]!r}")
    return assignment.cells[np.asarray([pos[s] for s in sample_ids], dtype=np.int64)]
