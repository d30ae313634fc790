"""Dataset loading, validation, centering, and synthetic blob generation.

The in-memory convention is features-by-samples: ``values[i, j]`` is feature
i of sample j, so a matrix has shape (d, n). CSV files on disk use the
opposite, samples-as-rows layout and are transposed on load.

Ground-truth labels, when present, exist for evaluation only. The solver
takes a bare ndarray, so labels can never leak into fitting.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np


class CsvFormatError(ValueError):
    """A CSV file could not be parsed into a numeric data matrix."""


@dataclass
class DataMatrix:
    """d features x n samples with optional feature names and labels.

    Labels must be contiguous class indices 0..c-1; `load_csv` and
    `make_blobs` produce them in that form, direct construction validates it.
    """

    values: np.ndarray
    feature_names: list[str] | None = None
    labels: np.ndarray | None = field(default=None)

    def __post_init__(self):
        # Copy so freezing never touches a caller-owned array.
        values = np.array(self.values, dtype=np.float64, order="C")
        if values.ndim != 2:
            raise ValueError(f"expected a 2-d matrix, got ndim={values.ndim}")
        d, n = values.shape
        if d < 1:
            raise ValueError("need at least one feature")
        if n < 2:
            raise ValueError(f"need at least two samples, got n={n}")
        if not np.all(np.isfinite(values)):
            raise ValueError("data matrix contains non-finite entries")
        values.flags.writeable = False
        self.values = values

        if self.feature_names is not None:
            if len(self.feature_names) != d:
                raise ValueError(
                    f"{len(self.feature_names)} feature names for {d} features"
                )
            self.feature_names = list(self.feature_names)

        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64, order="C")
            if labels.shape != (n,):
                raise ValueError(f"labels shape {labels.shape} != ({n},)")
            classes = np.unique(labels)
            if not np.array_equal(classes, np.arange(classes.size)):
                raise ValueError(
                    "labels must be contiguous class indices 0..c-1"
                )
            labels.flags.writeable = False
            self.labels = labels

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> int:
        if self.labels is None:
            raise ValueError("data has no labels")
        return int(self.labels.max()) + 1


@dataclass
class CenterReport:
    """What `center` subtracted.

    `was_centered` records whether the input already had (numerically) zero
    feature means before the call.
    """

    mean_vector: np.ndarray
    was_centered: bool


def center(data: DataMatrix) -> tuple[DataMatrix, CenterReport]:
    """Subtract the per-feature sample mean.

    Returns the centered matrix (names and labels carried over) and a report
    with the subtracted mean. Idempotent up to floating-point residue.
    """
    mean = data.values.mean(axis=1)
    scale = float(np.abs(data.values).max())
    already = bool(np.abs(mean).max() <= 1e-12 * (1.0 + scale))
    centered = DataMatrix(
        data.values - mean[:, None],
        feature_names=data.feature_names,
        labels=data.labels,
    )
    return centered, CenterReport(mean_vector=mean, was_centered=already)


def _looks_like_header(row: list[str]) -> bool:
    for cell in row:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def load_csv(path, label_column: str | int | None = None) -> DataMatrix:
    """Load a samples-as-rows CSV into a (d, n) DataMatrix.

    Args:
        path: CSV file; first line may be a header (detected by whether every
            cell parses as a number). Values must be finite decimal reals.
        label_column: column holding ground-truth labels, by header name or
            zero-based index. Label values are re-indexed to 0..c-1 in sorted
            order of their string form.

    Raises:
        CsvFormatError: on unparseable cells (row and column reported),
            ragged rows, or fewer than two samples.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise CsvFormatError(f"{path}: empty file")

    header: list[str] | None = rows[0] if _looks_like_header(rows[0]) else None
    data_rows = rows[1:] if header is not None else rows
    first_line = 2 if header is not None else 1
    if not data_rows:
        raise CsvFormatError(f"{path}: no data rows")

    n_cols = len(data_rows[0]) if header is None else len(header)

    label_idx: int | None = None
    if label_column is not None:
        if isinstance(label_column, str):
            if header is None:
                raise CsvFormatError(
                    f"{path}: label column {label_column!r} requested "
                    "by name but the file has no header"
                )
            try:
                label_idx = header.index(label_column)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: no column named {label_column!r} in header"
                ) from None
        else:
            label_idx = int(label_column)
            if not 0 <= label_idx < n_cols:
                raise CsvFormatError(
                    f"{path}: label column index {label_idx} out of range "
                    f"for {n_cols} columns"
                )

    def col_name(j: int) -> str:
        return repr(header[j]) if header is not None else str(j)

    samples: list[list[float]] = []
    raw_labels: list[str] = []
    for i, row in enumerate(data_rows):
        line = first_line + i
        if len(row) != n_cols:
            raise CsvFormatError(
                f"{path}: row {line} has {len(row)} cells, expected {n_cols}"
            )
        sample = []
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            text = cell.strip()
            if not text:
                raise CsvFormatError(
                    f"{path}: row {line}, column {col_name(j)}: empty cell"
                )
            try:
                value = float(text)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: row {line}, column {col_name(j)}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
            if not np.isfinite(value):
                raise CsvFormatError(
                    f"{path}: row {line}, column {col_name(j)}: "
                    f"non-finite value {cell!r}"
                )
            sample.append(value)
        samples.append(sample)

    labels = None
    if label_idx is not None:
        _, labels = np.unique(raw_labels, return_inverse=True)
        labels = labels.astype(np.int64)

    feature_names = None
    if header is not None:
        feature_names = [h for j, h in enumerate(header) if j != label_idx]

    values = np.asarray(samples, dtype=np.float64).T
    return DataMatrix(values, feature_names=feature_names, labels=labels)


def write_csv(data: DataMatrix, path) -> None:
    """Write samples-as-rows CSV that `load_csv` round-trips exactly.

    Values are written with repr(), the shortest decimal form that parses
    back to the identical float64.
    """
    names = data.feature_names or [f"f{i}" for i in range(data.d)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        head = list(names)
        if data.labels is not None:
            head.append("label")
        writer.writerow(head)
        for j in range(data.n):
            row = [repr(float(v)) for v in data.values[:, j]]
            if data.labels is not None:
                row.append(str(int(data.labels[j])))
            writer.writerow(row)


def make_blobs(
    n_per_cluster: int,
    c: int,
    d_informative: int,
    d_noise: int,
    separation: float,
    noise_scale: float,
    seed: int,
) -> DataMatrix:
    """Generate Gaussian blobs with appended pure-noise features.

    The first `d_informative` features carry cluster structure: cluster
    centers are drawn at random and rescaled so the closest pair sits exactly
    `separation` apart, then samples scatter around them with standard
    deviation `noise_scale`. The remaining `d_noise` features are zero-mean
    Gaussian noise of the same scale, identical across clusters. Labels are
    the generating cluster ids. Bit-reproducible for a fixed seed.
    """
    if min(n_per_cluster, c, d_informative, d_noise) < 1:
        raise ValueError("all counts must be >= 1")
    if separation <= 0:
        raise ValueError("separation must be > 0")
    rng = np.random.default_rng(seed)

    centers = rng.normal(size=(c, d_informative))
    if c > 1:
        gaps = [
            np.linalg.norm(centers[a] - centers[b])
            for a in range(c)
            for b in range(a + 1, c)
        ]
        centers *= separation / min(gaps)

    blocks = [
        centers[k][:, None]
        + rng.normal(scale=noise_scale, size=(d_informative, n_per_cluster))
        for k in range(c)
    ]
    informative = np.hstack(blocks)
    n = n_per_cluster * c
    noise = rng.normal(scale=noise_scale, size=(d_noise, n))

    names = [f"informative_{i}" for i in range(d_informative)]
    names += [f"noise_{i}" for i in range(d_noise)]
    labels = np.repeat(np.arange(c, dtype=np.int64), n_per_cluster)
    return DataMatrix(
        np.vstack([informative, noise]), feature_names=names, labels=labels
    )
