import csv

import numpy as np
import pytest

from ufcm.dataset import (
    CsvFormatError,
    DataMatrix,
    center,
    load_csv,
    make_blobs,
    write_csv,
)


def test_datamatrix_shape_and_orientation():
    dm = DataMatrix(np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]))
    assert dm.d == 2 and dm.n == 3


def test_datamatrix_rejects_single_sample():
    with pytest.raises(ValueError, match="two samples"):
        DataMatrix(np.array([[1.0], [2.0]]))


def test_datamatrix_rejects_non_finite():
    with pytest.raises(ValueError, match="finite"):
        DataMatrix(np.array([[1.0, np.nan]]))


def test_datamatrix_rejects_gappy_labels():
    with pytest.raises(ValueError, match="contiguous"):
        DataMatrix(np.zeros((2, 3)), labels=[0, 2, 2])


def test_datamatrix_does_not_freeze_caller_array():
    x = np.zeros((2, 2))
    DataMatrix(x)
    x[0, 0] = 1.0  # caller array stays writable


def test_load_csv_with_label_column(tmp_path):
    path = tmp_path / "small.csv"
    path.write_text("a,b,cls\n1.0,2.0,x\n3.0,4.0,y\n5.0,6.0,x\n")
    dm = load_csv(path, label_column="cls")
    assert dm.d == 2 and dm.n == 3
    assert dm.feature_names == ["a", "b"]
    assert dm.labels.tolist() == [0, 1, 0]
    assert dm.values[:, 2].tolist() == [5.0, 6.0]


def test_load_csv_label_by_index_without_header(tmp_path):
    path = tmp_path / "nohdr.csv"
    path.write_text("1.0,2.0,0\n3.0,4.0,1\n")
    dm = load_csv(path, label_column=2)
    assert dm.d == 2 and dm.n == 2
    assert dm.labels.tolist() == [0, 1]


def test_load_csv_blank_cell_names_row_and_column(tmp_path):
    path = tmp_path / "blank.csv"
    path.write_text("a,b\n1.0,2.0\n3.0,\n")
    with pytest.raises(CsvFormatError, match=r"row 3.*'b'.*empty"):
        load_csv(path)


def test_load_csv_bad_cell_names_row_and_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\noops,4.0\n")
    with pytest.raises(CsvFormatError, match=r"row 2, column 0"):
        load_csv(path)


def test_load_csv_ragged_row(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1.0,2.0\n3.0\n")
    with pytest.raises(CsvFormatError, match="has 1 cells, expected 2"):
        load_csv(path)


def test_load_csv_rejects_inf(tmp_path):
    path = tmp_path / "inf.csv"
    path.write_text("1.0,inf\n2.0,3.0\n")
    with pytest.raises(CsvFormatError, match="non-finite"):
        load_csv(path)


def test_load_csv_iris_shaped(tmp_path):
    # 150 samples x 4 features + 3-class label column.
    rng = np.random.default_rng(0)
    path = tmp_path / "iris_like.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sl", "sw", "pl", "pw", "species"])
        for i in range(150):
            writer.writerow(
                [f"{v:.3f}" for v in rng.normal(size=4)] + [f"cls{i % 3}"]
            )
    # Independent count with the stock reader.
    with open(path, newline="") as fh:
        n_lines = sum(1 for _ in csv.reader(fh))
    dm = load_csv(path, label_column="species")
    assert (dm.d, dm.n) == (4, n_lines - 1) == (4, 150)
    assert dm.n_classes == 3


def test_center_arithmetic():
    dm = DataMatrix(np.array([[1.0, 3.0], [2.0, 2.0]]))
    centered, report = center(dm)
    assert np.array_equal(centered.values, [[-1.0, 1.0], [0.0, 0.0]])
    assert np.array_equal(report.mean_vector, [2.0, 2.0])
    assert not report.was_centered


def test_center_idempotent():
    rng = np.random.default_rng(1)
    dm = DataMatrix(rng.normal(size=(4, 9)) * 10.0)
    once, _ = center(dm)
    twice, report = center(once)
    assert report.was_centered
    assert np.abs(twice.values - once.values).max() < 1e-12


def test_center_zero_means_by_direct_summation():
    rng = np.random.default_rng(2)
    dm = DataMatrix(rng.normal(loc=5.0, size=(5, 20)))
    centered, report = center(dm)
    for i in range(5):
        total = sum(float(v) for v in centered.values[i])
        orig_mean = abs(float(report.mean_vector[i]))
        assert abs(total / 20.0) < 1e-10 * (1.0 + orig_mean)


def test_center_keeps_labels():
    dm = DataMatrix(np.arange(8.0).reshape(2, 4), labels=[0, 0, 1, 1])
    centered, _ = center(dm)
    assert centered.labels.tolist() == [0, 0, 1, 1]


def test_make_blobs_shapes_and_labels():
    dm = make_blobs(50, 3, 5, 45, separation=4.0, noise_scale=1.0, seed=0)
    assert (dm.d, dm.n) == (50, 150)
    assert dm.n_classes == 3
    assert np.bincount(dm.labels).tolist() == [50, 50, 50]
    assert dm.feature_names[0] == "informative_0"
    assert dm.feature_names[5] == "noise_0"


def test_make_blobs_same_seed_bit_identical():
    a = make_blobs(10, 2, 3, 4, separation=2.0, noise_scale=0.5, seed=42)
    b = make_blobs(10, 2, 3, 4, separation=2.0, noise_scale=0.5, seed=42)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.labels, b.labels)


def test_make_blobs_noise_variance():
    dm = make_blobs(1000, 3, 2, 6, separation=4.0, noise_scale=1.5, seed=3)
    for i in range(2, 8):
        row = dm.values[i]
        # two-pass sample variance, independent of numpy's var
        mean = sum(row) / row.size
        var = sum((v - mean) ** 2 for v in row) / (row.size - 1)
        assert abs(var - 1.5**2) < 0.2 * 1.5**2


def test_make_blobs_separation_between_cluster_means():
    dm = make_blobs(500, 3, 4, 1, separation=6.0, noise_scale=1.0, seed=4)
    means = [
        dm.values[:4, dm.labels == k].mean(axis=1) for k in range(3)
    ]
    for a in range(3):
        for b in range(a + 1, 3):
            # empirical means sit within ~0.1 of the true centers
            assert np.linalg.norm(means[a] - means[b]) > 6.0 * 0.9


def test_make_blobs_validates():
    with pytest.raises(ValueError):
        make_blobs(0, 3, 2, 2, separation=1.0, noise_scale=1.0, seed=0)
    with pytest.raises(ValueError):
        make_blobs(5, 3, 2, 2, separation=0.0, noise_scale=1.0, seed=0)


def test_csv_round_trip_exact(tmp_path):
    rng = np.random.default_rng(5)
    dm = DataMatrix(
        rng.normal(size=(3, 7)) * np.pi,
        feature_names=["x", "y", "z"],
        labels=[0, 1, 2, 0, 1, 2, 0],
    )
    path = tmp_path / "rt.csv"
    write_csv(dm, path)
    back = load_csv(path, label_column="label")
    assert np.array_equal(back.values, dm.values)  # bitwise via repr()
    assert np.array_equal(back.labels, dm.labels)
    assert back.feature_names == dm.feature_names


def test_csv_round_trip_without_labels(tmp_path):
    dm = DataMatrix(np.array([[1.5, -2.25], [1e-17, 3.0]]))
    path = tmp_path / "rt2.csv"
    write_csv(dm, path)
    back = load_csv(path)
    assert np.array_equal(back.values, dm.values)
    assert back.labels is None
