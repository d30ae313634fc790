"""Batch experiment runner.

Pipeline per grid point: load or generate data, center (optionally scale to
unit variance), solve, rank features, select each requested count, evaluate
by repeated K-means against ground-truth labels. One JSON record and one
columnar trace file per grid point, a flat CSV summary across all of them,
and (when labels exist) the best-by-accuracy row in a separate file, since
picking by accuracy is an oracle selection unavailable to a truly
unsupervised user.

Exit codes: 0 success, 1 runtime/I-O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .dataset import CsvFormatError, DataMatrix, center, load_csv, make_blobs
from .metrics import evaluate_clustering, rank_features, select
from .solver import SolverConfig, SolverResult, solve

DEFAULT_GRID = "1e-3,1e-1,1e1,1e3"

_BLOB_KEYS = {
    "n_per_cluster": int,
    "c": int,
    "d_informative": int,
    "d_noise": int,
    "separation": float,
    "noise_scale": float,
}


class UsageError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    out: str
    clusters: int
    input: str | None = None
    label_column: str | int | None = None
    synthetic: str | None = None
    alpha: float = 1.0
    beta: float = 1.0
    p: float = 1.0
    dim: int | None = None
    select_counts: list[int] | None = None
    restarts: int = 10
    max_iter: int = 50
    tol: float = 1e-6
    seed: int = 0
    eval_runs: int = 5
    grid_alpha: list[float] | None = None
    grid_beta: list[float] | None = None
    grid_p: list[float] | None = None
    jobs: int = 1
    scale: bool = False

    def __post_init__(self):
        if (self.input is None) == (self.synthetic is None):
            raise UsageError("exactly one of --input / --synthetic required")
        for name in ("grid_alpha", "grid_beta", "grid_p"):
            grid = getattr(self, name)
            if grid is not None and not grid:
                raise UsageError(f"{name} must be non-empty when given")
        if self.select_counts is not None:
            if not self.select_counts or min(self.select_counts) < 1:
                raise UsageError("--select values must be positive")
        if self.eval_runs < 1:
            raise UsageError("--eval-runs must be >= 1")
        if self.jobs < 1:
            raise UsageError("--jobs must be >= 1")


def _parse_synthetic(text: str, seed: int) -> DataMatrix:
    kind, _, body = text.partition(":")
    if kind != "blobs":
        raise UsageError(f"unknown synthetic generator {kind!r}")
    kwargs = {}
    for item in body.split(","):
        key, eq, value = item.partition("=")
        key = key.strip()
        if not eq or key not in _BLOB_KEYS:
            raise UsageError(f"bad synthetic parameter {item!r}")
        kwargs[key] = _BLOB_KEYS[key](value)
    missing = set(_BLOB_KEYS) - set(kwargs)
    if missing:
        raise UsageError(f"synthetic spec missing {sorted(missing)}")
    return make_blobs(seed=seed, **kwargs)


def _load_data(spec: ExperimentSpec) -> tuple[DataMatrix, dict]:
    if spec.input is not None:
        digest = hashlib.sha256(Path(spec.input).read_bytes()).hexdigest()
        data = load_csv(spec.input, label_column=spec.label_column)
        source = {
            "kind": "csv",
            "path": spec.input,
            "sha256": digest,
            "label_column": spec.label_column,
        }
    else:
        text = f"{spec.synthetic}|seed={spec.seed}"
        data = _parse_synthetic(spec.synthetic, spec.seed)
        source = {
            "kind": "synthetic",
            "generator": spec.synthetic,
            "sha256": hashlib.sha256(text.encode()).hexdigest(),
        }
    return data, source


def _prepare(data: DataMatrix, scale: bool) -> DataMatrix:
    prepared, _ = center(data)
    if scale:
        std = prepared.values.std(axis=1)
        std[std == 0.0] = 1.0
        prepared = DataMatrix(
            prepared.values / std[:, None],
            feature_names=prepared.feature_names,
            labels=prepared.labels,
        )
    return prepared


def emit_trace(result: SolverResult, path) -> None:
    """Write the objective trace as plot-ready columns, one row per state."""
    tr = result.trace
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["iteration", "objective", "fit", "scatter", "regularizer"]
        )
        for i in range(len(tr)):
            writer.writerow(
                [
                    i,
                    repr(tr.objective[i]),
                    repr(tr.fit_term[i]),
                    repr(tr.scatter_term[i]),
                    repr(tr.regularizer_pow_p[i]),
                ]
            )


def read_trace(path) -> dict[str, list]:
    """Parse an emit_trace file back into columns."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    columns: dict[str, list] = {name: [] for name in header}
    for row in body:
        for name, cell in zip(header, row):
            columns[name].append(int(cell) if name == "iteration" else float(cell))
    return columns


def _run_grid_point(task) -> list[dict]:
    """Solve one (alpha, beta, p) point and write its record and trace."""
    data, spec, source, gi, (alpha, beta, p) = task
    out = Path(spec.out)
    cfg = SolverConfig(
        alpha=alpha,
        beta=beta,
        p=p,
        c=spec.clusters,
        d_prime=spec.dim,
        r=spec.restarts,
        max_iter=spec.max_iter,
        tol=spec.tol,
        seed=spec.seed,
    )
    t0 = time.perf_counter()
    result = solve(data.values, cfg)
    solve_s = time.perf_counter() - t0

    ranking = rank_features(result.w)
    counts = spec.select_counts or [data.d]

    selected: dict[str, list[int]] = {}
    evaluation: dict[str, dict] = {}
    t0 = time.perf_counter()
    for mi, m in enumerate(counts):
        if m > data.d:
            raise ValueError(f"--select {m} exceeds feature count {data.d}")
        subset = select(data, ranking, m)
        selected[str(m)] = [int(i) for i in ranking.order[:m]]
        if data.labels is not None:
            eval_seed = int(
                np.random.SeedSequence(
                    [spec.seed, gi, mi]
                ).generate_state(1)[0]
            )
            stats = evaluate_clustering(
                subset, m, spec.clusters, spec.eval_runs, eval_seed
            )
            evaluation[str(m)] = dict(stats._asdict())
    eval_s = time.perf_counter() - t0

    tr = result.trace
    record = {
        "schema": "ufcm-result-v1",
        "source": source,
        "seed": spec.seed,
        "grid_index": gi,
        "config": asdict(cfg),
        "d_prime_resolved": cfg.d_prime if cfg.d_prime is not None else cfg.c,
        "preprocessing": {"centered": True, "unit_variance": spec.scale},
        "solver": {
            "converged": result.converged,
            "iterations": result.iterations,
            "final_objective": tr.objective[-1],
        },
        "trace": {
            "objective": tr.objective,
            "fit_term": tr.fit_term,
            "scatter_term": tr.scatter_term,
            "regularizer_pow_p": tr.regularizer_pow_p,
            "assignment_changes": tr.assignment_changes,
            "w_orth_error": tr.w_orth_error,
            "rel_change": [
                None if not np.isfinite(v) else v for v in tr.rel_change
            ],
        },
        "eval_runs": spec.eval_runs,
        "selected": selected,
        "evaluation": evaluation if data.labels is not None else None,
        "timing": {"solve_s": solve_s, "evaluate_s": eval_s},
    }
    (out / f"record_gp{gi:03d}.json").write_text(
        json.dumps(record, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    emit_trace(result, out / f"trace_gp{gi:03d}.csv")

    rows = []
    for m in counts:
        stats = evaluation.get(str(m), {})
        rows.append(
            {
                "grid_index": gi,
                "alpha": alpha,
                "beta": beta,
                "p": p,
                "m": m,
                "acc_mean": stats.get("acc_mean", ""),
                "acc_std": stats.get("acc_std", ""),
                "nmi_mean": stats.get("nmi_mean", ""),
                "nmi_std": stats.get("nmi_std", ""),
                "converged": result.converged,
                "iterations": result.iterations,
                "objective": tr.objective[-1],
            }
        )
    return rows


_SUMMARY_FIELDS = [
    "grid_index",
    "alpha",
    "beta",
    "p",
    "m",
    "acc_mean",
    "acc_std",
    "nmi_mean",
    "nmi_std",
    "converged",
    "iterations",
    "objective",
]


def run_experiment(spec: ExperimentSpec) -> list[dict]:
    """Execute every grid point, write records, traces, and the summary.

    Returns the summary rows. Grid points run in parallel when spec.jobs > 1;
    each worker writes its own record and trace, the summary is aggregated
    here afterwards in grid order.
    """
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    raw, source = _load_data(spec)
    data = _prepare(raw, spec.scale)

    points = list(
        itertools.product(
            spec.grid_alpha or [spec.alpha],
            spec.grid_beta or [spec.beta],
            spec.grid_p or [spec.p],
        )
    )
    tasks = [(data, spec, source, gi, pt) for gi, pt in enumerate(points)]

    if spec.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            per_point = list(pool.map(_run_grid_point, tasks))
    else:
        per_point = [_run_grid_point(t) for t in tasks]

    rows = [row for rows in per_point for row in rows]
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=_SUMMARY_FIELDS)
        writer.writeheader()
        writer.writerows(rows)

    scored = [r for r in rows if r["acc_mean"] != ""]
    if scored:
        best = max(scored, key=lambda r: r["acc_mean"])
        with open(
            out / "best_by_acc.csv", "w", newline="", encoding="utf-8"
        ) as fh:
            writer = csv.DictWriter(fh, fieldnames=_SUMMARY_FIELDS + ["selection"])
            writer.writeheader()
            writer.writerow({**best, "selection": "oracle-best-acc"})
    return rows


def load_record(path) -> tuple[dict, SolverConfig]:
    """Read a result record back, re-validating its embedded config."""
    record = json.loads(Path(path).read_text(encoding="utf-8"))
    return record, SolverConfig(**record["config"])


def _comma_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _comma_ints(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _label_column(text: str) -> str | int:
    try:
        return int(text)
    except ValueError:
        return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ufcm",
        description="Unsupervised feature selection experiment runner.",
    )
    src = parser.add_argument_group("data source (exactly one)")
    src.add_argument("--input", help="samples-as-rows CSV file")
    src.add_argument(
        "--synthetic",
        help=(
            "generator spec, e.g. blobs:n_per_cluster=50,c=3,"
            "d_informative=5,d_noise=45,separation=4.0,noise_scale=1.0"
        ),
    )
    parser.add_argument(
        "--label-column",
        type=_label_column,
        help="CSV column with ground-truth labels (name or 0-based index)",
    )
    parser.add_argument("--alpha", type=float, default=1.0)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--p", type=float, default=1.0)
    parser.add_argument("--clusters", type=int, required=True)
    parser.add_argument(
        "--dim", type=int, help="projection dimension d' (default: clusters)"
    )
    parser.add_argument(
        "--select",
        type=_comma_ints,
        help="comma list of selected-feature counts (default: all features)",
    )
    parser.add_argument("--restarts", type=int, default=10)
    parser.add_argument("--max-iter", type=int, default=50)
    parser.add_argument("--tol", type=float, default=1e-6)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--eval-runs", type=int, default=5)
    for name in ("alpha", "beta", "p"):
        parser.add_argument(
            f"--grid-{name}",
            type=_comma_floats,
            nargs="?",
            const=_comma_floats(DEFAULT_GRID),
            help=f"sweep {name} over a comma list (bare flag: {DEFAULT_GRID})",
        )
    parser.add_argument(
        "--scale",
        action="store_true",
        help="scale features to unit variance after centering",
    )
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = ExperimentSpec(
            out=args.out,
            clusters=args.clusters,
            input=args.input,
            label_column=args.label_column,
            synthetic=args.synthetic,
            alpha=args.alpha,
            beta=args.beta,
            p=args.p,
            dim=args.dim,
            select_counts=args.select,
            restarts=args.restarts,
            max_iter=args.max_iter,
            tol=args.tol,
            seed=args.seed,
            eval_runs=args.eval_runs,
            grid_alpha=args.grid_alpha,
            grid_beta=args.grid_beta,
            grid_p=args.grid_p,
            jobs=args.jobs,
            scale=args.scale,
        )
    except UsageError as exc:
        print(f"ufcm: {exc}", file=sys.stderr)
        return 2
    try:
        run_experiment(spec)
    except (UsageError, CsvFormatError) as exc:
        print(f"ufcm: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"ufcm: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
