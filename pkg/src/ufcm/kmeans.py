"""Indicator-matrix K-means in the transformed space.

Data enters as (d', n): columns are samples already projected by the
coefficient matrix. Centers are (d', c). The hot loops live in `_kernels`
and run on the transposed, samples-as-rows copies.

All randomness flows from explicit integer seeds; runs are bit-reproducible
per kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels


@dataclass
class IndicatorMatrix:
    """One cluster id per sample; the dense one-hot form on demand.

    Produced by `assign`/`run_kmeans`, every cluster is non-empty, which
    keeps U^T U invertible for the centroid closed form.
    """

    assignments: np.ndarray  # (n,) int64 in 0..n_clusters-1
    n_clusters: int

    def __post_init__(self):
        a = np.array(self.assignments, dtype=np.int64, order="C")
        if a.ndim != 1:
            raise ValueError("assignments must be a 1-d array")
        if self.n_clusters < 1:
            raise ValueError("n_clusters must be >= 1")
        if a.size and (a.min() < 0 or a.max() >= self.n_clusters):
            raise ValueError("assignment out of range")
        a.flags.writeable = False
        self.assignments = a

    @property
    def n(self) -> int:
        return self.assignments.size

    def counts(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.n_clusters)

    def dense(self) -> np.ndarray:
        """The (n, c) one-hot matrix U."""
        u = np.zeros((self.n, self.n_clusters))
        u[np.arange(self.n), self.assignments] = 1.0
        return u


class KMeansResult(NamedTuple):
    indicator: IndicatorMatrix
    centers: np.ndarray  # (d', c)
    fit: float           # ||Y - G U^T||_F^2 at the returned state
    fit_history: tuple[float, ...] = ()


def _rows(y: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(y, dtype=np.float64).T)


def _repair_empty(yt, labels, center_rows, c):
    """Give each empty cluster the farthest member of the largest cluster.

    Distance is measured to the largest cluster's current (pre-update)
    centroid. Ties pick the lowest index. Requires n >= c.
    """
    counts = np.bincount(labels, minlength=c)
    empties = list(np.flatnonzero(counts == 0))
    if not empties:
        return labels
    labels = labels.copy()
    for k in empties:
        donor = int(np.argmax(counts))
        members = np.flatnonzero(labels == donor)
        diff = yt[members] - center_rows[donor]
        far = members[int(np.argmax(np.einsum("ij,ij->i", diff, diff)))]
        labels[far] = k
        counts[donor] -= 1
        counts[k] += 1
    return labels


def assign(y: np.ndarray, centers: np.ndarray) -> IndicatorMatrix:
    """Nearest-center assignment, ties to the lowest cluster index.

    Minimizes ||Y - G U^T||_F^2 over one-hot U for the given centers; empty
    clusters are then repaired so every cluster keeps at least one sample.
    """
    y = np.asarray(y, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    if y.ndim != 2 or centers.ndim != 2 or y.shape[0] != centers.shape[0]:
        raise ValueError(
            f"dimension mismatch: y {y.shape} vs centers {centers.shape}"
        )
    c = centers.shape[1]
    if c > y.shape[1]:
        raise ValueError(f"more clusters ({c}) than samples ({y.shape[1]})")
    yt = _rows(y)
    center_rows = _rows(centers)
    labels = _kernels.assign_labels(yt, center_rows)
    labels = _repair_empty(yt, labels, center_rows, c)
    return IndicatorMatrix(labels, c)


def centroids(y: np.ndarray, indicator: IndicatorMatrix) -> np.ndarray:
    """Per-cluster means of the assigned samples, as a (d', c) matrix.

    Equals Y U (U^T U)^{-1} since U^T U is the diagonal of cluster sizes.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape[1] != indicator.n:
        raise ValueError("sample count mismatch")
    sums, counts = _kernels.centroid_sums(
        _rows(y), indicator.assignments, indicator.n_clusters
    )
    if np.any(counts == 0):
        raise ValueError(f"empty cluster {int(np.argmin(counts))}")
    return (sums / counts[:, None]).T


def run_kmeans(
    y: np.ndarray, c: int, seed: int, max_iter: int = 100
) -> KMeansResult:
    """Lloyd iterations from c distinct random samples as initial centers.

    Alternates assignment and centroid steps until the assignment stabilizes
    or max_iter is hit. The recorded fit history (one entry per centroid
    update) is non-increasing. Deterministic given the seed.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.shape[1]
    if not 1 <= c <= n:
        raise ValueError(f"cluster count {c} out of range [1, {n}]")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    yt = _rows(y)
    rng = np.random.default_rng(seed)
    center_rows = yt[rng.choice(n, size=c, replace=False)].copy()

    labels = None
    history = []
    for _ in range(max_iter):
        new = _kernels.assign_labels(yt, center_rows)
        new = _repair_empty(yt, new, center_rows, c)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        sums, counts = _kernels.centroid_sums(yt, labels, c)
        center_rows = sums / counts[:, None]
        history.append(_kernels.fit_value(yt, center_rows, labels))

    return KMeansResult(
        indicator=IndicatorMatrix(labels, c),
        centers=center_rows.T.copy(),
        fit=history[-1],
        fit_history=tuple(history),
    )


def update_u_with_candidates(
    y: np.ndarray,
    u_prev: IndicatorMatrix,
    c: int,
    r: int,
    seed: int,
    max_iter: int = 100,
) -> KMeansResult:
    """Best of the incumbent and r fresh K-means runs, by fit.

    Each candidate is a converged run from a distinct derived seed and is
    scored by ||Y - G U^T||_F^2 under its own induced centroids; the
    incumbent is scored the same way and wins ties, so the returned fit
    never exceeds the incumbent's.
    """
    y = np.asarray(y, dtype=np.float64)
    if u_prev.n != y.shape[1]:
        raise ValueError("u_prev does not match the sample count")
    if u_prev.n_clusters != c:
        raise ValueError("u_prev cluster count mismatch")
    if r < 0:
        raise ValueError("r must be >= 0")

    inc_centers = centroids(y, u_prev)
    inc_fit = _kernels.fit_value(
        _rows(y), _rows(inc_centers), u_prev.assignments
    )
    best = KMeansResult(indicator=u_prev, centers=inc_centers, fit=inc_fit)

    if r > 0:
        for s in np.random.SeedSequence(seed).generate_state(r):
            cand = run_kmeans(y, c, int(s), max_iter=max_iter)
            if cand.fit < best.fit:
                best = cand
    return best
