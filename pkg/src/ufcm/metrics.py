"""Feature ranking and clustering-agreement metrics.

Accuracy maps predicted clusters to ground-truth classes with the optimal
injective assignment (Kuhn-Munkres on the contingency table); mutual
information is normalized by the geometric mean of the partition entropies.
Both are invariant to relabeling of either argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dataset import DataMatrix
from .kmeans import run_kmeans


@dataclass
class FeatureRanking:
    """Per-feature scores with the descending order, ties by lower index."""

    scores: np.ndarray  # (d,)
    order: np.ndarray   # permutation of 0..d-1


@dataclass
class ContingencyTable:
    counts: np.ndarray  # (c_pred, c_true) non-negative ints
    n: int


def l2p_norm(m: np.ndarray, p: float) -> float:
    """Row-wise l2 norms aggregated with power p: (sum_i ||m^i||^p)^(1/p)."""
    if not p > 0:
        raise ValueError("p must be > 0")
    m = np.asarray(m, dtype=np.float64)
    row_norms = np.linalg.norm(m, axis=1)
    return float(np.sum(row_norms**p) ** (1.0 / p))


def rank_features(w: np.ndarray) -> FeatureRanking:
    """Score each feature by the l2 norm of its coefficient row."""
    w = np.asarray(w, dtype=np.float64)
    scores = np.linalg.norm(w, axis=1)
    order = np.argsort(-scores, kind="stable")
    return FeatureRanking(scores=scores, order=order)


def select(data: DataMatrix, ranking: FeatureRanking, m: int) -> DataMatrix:
    """Restrict to the top-m ranked features, keeping sample order and labels."""
    if not 1 <= m <= data.d:
        raise ValueError(f"m={m} out of range [1, {data.d}]")
    idx = ranking.order[:m]
    names = None
    if data.feature_names is not None:
        names = [data.feature_names[i] for i in idx]
    return DataMatrix(
        data.values[idx], feature_names=names, labels=data.labels
    )


def max_variance_ranking(data: DataMatrix) -> FeatureRanking:
    """Rank features by sample variance, descending."""
    scores = data.values.var(axis=1, ddof=1)
    order = np.argsort(-scores, kind="stable")
    return FeatureRanking(scores=scores, order=order)


def _as_indices(labels) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("labels must be 1-d")
    _, idx = np.unique(labels, return_inverse=True)
    return idx.astype(np.int64)


def contingency(pred, truth) -> ContingencyTable:
    """Joint count table of two labelings of the same samples."""
    p = _as_indices(pred)
    t = _as_indices(truth)
    if p.size != t.size:
        raise ValueError("label sequences differ in length")
    if p.size == 0:
        raise ValueError("empty labelings")
    cp = int(p.max()) + 1
    ct = int(t.max()) + 1
    counts = np.bincount(p * ct + t, minlength=cp * ct).reshape(cp, ct)
    return ContingencyTable(counts=counts, n=p.size)


def accuracy(pred, truth) -> float:
    """Fraction matched under the best injective cluster-to-class mapping.

    The contingency table is padded to square and the maximizing assignment
    found by Kuhn-Munkres on max-count-minus-count costs.
    """
    table = contingency(pred, truth)
    counts = table.counts
    size = max(counts.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: counts.shape[0], : counts.shape[1]] = counts
    rows, cols = linear_sum_assignment(padded.max() - padded)
    return float(padded[rows, cols].sum()) / table.n


def nmi(pred, truth) -> float:
    """Mutual information over the geometric mean of partition entropies.

    Computed directly on contingency counts with the 0 log 0 = 0 convention.
    When either partition has a single class the denominator vanishes: the
    value is defined as 1.0 if both are single-class, else 0.0.
    """
    table = contingency(pred, truth)
    counts = table.counts
    n = table.n
    t_pred = counts.sum(axis=1)
    t_true = counts.sum(axis=0)

    den_pred = float(np.sum(t_pred * np.log(t_pred / n)))
    den_true = float(np.sum(t_true * np.log(t_true / n)))
    if den_pred == 0.0 or den_true == 0.0:
        return 1.0 if counts.shape == (1, 1) else 0.0

    nz = counts > 0
    ratio = n * counts[nz] / np.outer(t_pred, t_true)[nz]
    num = float(np.sum(counts[nz] * np.log(ratio)))
    value = num / np.sqrt(den_pred * den_true)
    return float(min(max(value, 0.0), 1.0))


class EvalStats(NamedTuple):
    acc_mean: float
    acc_std: float
    nmi_mean: float
    nmi_std: float


def evaluate_clustering(
    data: DataMatrix, m: int, c: int, runs: int, seed: int
) -> EvalStats:
    """Repeated K-means on the first m feature rows, scored against labels.

    Rows are taken in the order they appear, so pass `select` output (or any
    matrix whose leading rows are the features to test). Each run uses a
    distinct seed derived from `seed`; means and standard deviations (ddof 0)
    of accuracy and mutual information are reported.
    """
    if data.labels is None:
        raise ValueError("ground-truth labels are required for evaluation")
    if not 1 <= m <= data.d:
        raise ValueError(f"m={m} out of range [1, {data.d}]")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    sub = data.values[:m]
    accs = np.empty(runs)
    nmis = np.empty(runs)
    for i, s in enumerate(np.random.SeedSequence(seed).generate_state(runs)):
        pred = run_kmeans(sub, c, int(s)).indicator.assignments
        accs[i] = accuracy(pred, data.labels)
        nmis[i] = nmi(pred, data.labels)
    return EvalStats(
        acc_mean=float(accs.mean()),
        acc_std=float(accs.std()),
        nmi_mean=float(nmis.mean()),
        nmi_std=float(nmis.std()),
    )
