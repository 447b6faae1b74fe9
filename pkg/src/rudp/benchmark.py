"""Benchmark cells: one (method, sweep point, seed) run each.

A cell is described by a flat dict of plain values. :func:`run_cell` is a
pure function of that dict, so a recorded cell can be re-run later and must
reproduce the same metrics bit for bit.
"""

import csv
import hashlib
import itertools
import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import data as datamod
from .baselines import kmeans, pca_project
from .core import Hyperparams, fit
from .metrics import evaluate

METHODS = ("rudp", "kmeans", "pca")
METRIC_KEYS = ("acc", "nmi", "pur", "ari")
SWEEP_KEYS = ("dim", "outlier_frac", "snr_db", "lambda", "beta")

# synthetic source used when no --data file is given
SYNTH_DEFAULTS = {"n_per_class": 33, "features": 20, "subspace_dim": 3,
                  "separation": 8.0, "sigma": 1.0}


def load_source(cfg):
    """Dataset for a cell: a CSV file, or synthetic clusters drawn with the cell seed."""
    if cfg.get("data"):
        ds = datamod.load_csv(cfg["data"], cfg.get("layout", "rows"), cfg.get("label_col"))
    else:
        ds = datamod.synth_clusters(cfg["clusters"], cfg["n_per_class"], cfg["features"],
                                    cfg["subspace_dim"], cfg["separation"], cfg["sigma"],
                                    seed=cfg["seed"])
    if cfg.get("standardize", True):
        ds = datamod.standardize(ds)
    if cfg.get("outlier_frac"):
        spec = datamod.CorruptionSpec("outlier", fraction=cfg["outlier_frac"], seed=cfg["seed"])
        ds = datamod.inject_outliers(ds, spec)
    if cfg.get("snr_db") is not None:
        ds = datamod.inject_noise_snr(ds, cfg["snr_db"], seed=cfg["seed"])
    return ds


def hyperparams_from(cfg):
    return Hyperparams(lam=cfg["lambda"], beta=cfg["beta"], m=cfg["dim"], c=cfg["clusters"],
                       knn=cfg["knn"], max_outer_iters=cfg["max_iters"],
                       eps_converge=cfg["tol"], seed=cfg["seed"])


def predict(cfg, ds):
    method = cfg["method"]
    if method == "rudp":
        return fit(ds.X, hyperparams_from(cfg)).labels
    if method == "kmeans":
        return kmeans(ds.X.T, cfg["clusters"], seed=cfg["seed"]).labels
    if method == "pca":
        _, projected, _ = pca_project(ds.X, cfg["dim"])
        return kmeans(projected.T, cfg["clusters"], seed=cfg["seed"]).labels
    raise ValueError(f"unknown method {method!r}")


def cell_id(cfg):
    blob = json.dumps(cfg, sort_keys=True).encode()
    return f"{cfg['method']}-{hashlib.sha1(blob).hexdigest()[:12]}"


def run_cell(cfg):
    """Run one cell; failures are caught and reported in the ``error`` field."""
    row = {"cell": cell_id(cfg), **cfg}
    start = time.perf_counter()
    try:
        ds = load_source(cfg)
        if ds.truth is None:
            raise ValueError("benchmark needs ground-truth labels (set --label-col)")
        report = evaluate(predict(cfg, ds), ds.truth)
        row.update(report.as_dict())
        row["error"] = ""
    except Exception as exc:  # a failed cell must not stop the sweep
        row.update({k: float("nan") for k in METRIC_KEYS})
        row["error"] = f"{type(exc).__name__}: {exc}"
        row["traceback"] = traceback.format_exc()
    row["runtime_s"] = time.perf_counter() - start
    return row


def expand_cells(base, sweeps, methods, repeats):
    """Cross product of sweep values, seeds ``base["seed"] + r`` and methods."""
    keys = [k for k in SWEEP_KEYS if k in sweeps]
    cells = []
    for values in itertools.product(*(sweeps[k] for k in keys)):
        point = dict(zip(keys, values))
        for r in range(repeats):
            for method in methods:
                cfg = {**base, **point, "method": method, "seed": base["seed"] + r}
                cells.append(cfg)
    return cells


def _write_cell(row, cell_dir):
    path = Path(cell_dir) / f"{row['cell']}.json"
    path.write_text(json.dumps(row, indent=1, sort_keys=True), encoding="utf-8")
    return path


def run_benchmark(cells, out_dir, workers=1):
    """Run ``cells``, writing one JSON file per cell, then merge the results.

    Returns the list of rows in cell order.
    """
    out = Path(out_dir)
    cell_dir = out / "cells"
    cell_dir.mkdir(parents=True, exist_ok=True)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(c) for c in cells]
    for row in rows:
        _write_cell(row, cell_dir)
    write_long_csv(rows, out / "results.csv")
    write_aggregate_csv(rows, out / "summary.csv")
    return rows


def _columns(rows):
    cols = ["cell", "method", *SWEEP_KEYS, "seed", *METRIC_KEYS, "runtime_s", "error"]
    extra = sorted({k for r in rows for k in r} - set(cols) - {"traceback"})
    return cols + extra


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return "" if value is None else str(value)


def write_long_csv(rows, path):
    cols = _columns(rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for r in rows:
            writer.writerow([_fmt(r.get(c)) for c in cols])


def aggregate(rows):
    """Mean metrics per (method, sweep point) over successful seeds."""
    groups = {}
    for r in rows:
        key = (r["method"],) + tuple(r.get(k) for k in SWEEP_KEYS)
        groups.setdefault(key, []).append(r)
    table = []
    for key, members in groups.items():
        ok = [m for m in members if not m["error"]]
        entry = dict(zip(("method",) + SWEEP_KEYS, key))
        for k in METRIC_KEYS + ("runtime_s",):
            entry[k] = float(np.mean([m[k] for m in ok])) if ok else float("nan")
        entry["repeats"] = len(ok)
        entry["failed"] = len(members) - len(ok)
        table.append(entry)
    return table


def write_aggregate_csv(rows, path):
    table = aggregate(rows)
    cols = ["method", *SWEEP_KEYS, *METRIC_KEYS, "runtime_s", "repeats", "failed"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for entry in table:
            writer.writerow([_fmt(entry.get(c)) for c in cols])


def rerun_recorded(path):
    """Re-run the cell stored at ``path`` and return ``(recorded_row, new_row)``."""
    recorded = json.loads(Path(path).read_text(encoding="utf-8"))
    cfg = {k: v for k, v in recorded.items()
           if k not in ("cell", "error", "traceback", "runtime_s") + METRIC_KEYS}
    return recorded, run_cell(cfg)
