"""Datasets, synthetic clusters, corruption protocols and windowing.

``Dataset.X`` is ``d x n``: one sample per column, matching the optimizer.
"""

import csv
import io
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._validation import as_finite_matrix, check_count


@dataclass
class Dataset:
    X: np.ndarray
    truth: np.ndarray = None
    feature_names: list = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.X = as_finite_matrix(self.X, name="X")
        if self.truth is not None:
            self.truth = np.asarray(self.truth)
            if self.truth.shape != (self.X.shape[1],):
                raise ValueError(
                    f"truth has {self.truth.shape[0]} labels for {self.X.shape[1]} samples"
                )

    @property
    def n_features(self):
        return self.X.shape[0]

    @property
    def n_samples(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class CorruptionSpec:
    kind: str
    fraction: float = None
    snr_db: float = None
    scope: str = "samples"
    seed: int = 0

    def __post_init__(self):
        if self.kind == "outlier":
            if self.fraction is None or self.snr_db is not None:
                raise ValueError("outlier corruption takes a fraction and no snr_db")
            if not 0.0 <= self.fraction <= 1.0:
                raise ValueError(f"outlier fraction must lie in [0, 1], got {self.fraction}")
            if self.scope not in ("samples", "entries"):
                raise ValueError(f"scope must be 'samples' or 'entries', got {self.scope!r}")
        elif self.kind == "snr_noise":
            if self.snr_db is None or self.fraction is not None:
                raise ValueError("snr_noise corruption takes snr_db and no fraction")
        else:
            raise ValueError(f"unknown corruption kind {self.kind!r}")


def _parse_float(cell, row, col):
    try:
        return float(cell)
    except ValueError:
        raise ValueError(f"non-numeric cell {cell!r} at row {row}, column {col}") from None


def load_csv(path, layout="samples_as_rows", label_column=None):
    """Read a numeric CSV with an optional single header line.

    ``layout`` is ``"samples_as_rows"`` (the usual one-row-per-sample file)
    or ``"samples_as_columns"``. ``label_column`` is a column index or a
    header name; it applies to the row layout only and is removed from ``X``.
    """
    layout = {"rows": "samples_as_rows", "columns": "samples_as_columns"}.get(layout, layout)
    if layout not in ("samples_as_rows", "samples_as_columns"):
        raise ValueError(f"unknown layout {layout!r}")
    text = Path(path).read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValueError(f"{path}: empty file")

    header = None
    try:
        [float(c) for c in rows[0]]
    except ValueError:
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise ValueError(f"{path}: ragged row {i + 1 + (header is not None)} "
                             f"has {len(r)} cells, expected {width}")

    label_idx = None
    if label_column is not None:
        if layout != "samples_as_rows":
            raise ValueError("label_column is only supported with samples_as_rows")
        if isinstance(label_column, str) and not label_column.lstrip("-").isdigit():
            if header is None or label_column not in header:
                raise ValueError(f"label column {label_column!r} not found in header")
            label_idx = header.index(label_column)
        else:
            label_idx = int(label_column) % width

    offset = 1 + (header is not None)
    values, labels = [], []
    for i, r in enumerate(rows):
        line = []
        for j, cell in enumerate(r):
            if j == label_idx:
                labels.append(cell.strip())
            else:
                line.append(_parse_float(cell, i + offset, j + 1))
        values.append(line)
    M = np.array(values, dtype=float)
    X = M.T if layout == "samples_as_rows" else M

    truth = None
    if label_idx is not None:
        try:
            numeric = np.array([float(v) for v in labels])
            truth = numeric.astype(np.int64) if np.all(numeric == np.round(numeric)) else numeric
        except ValueError:
            truth = np.array(labels)
    names = None
    if header is not None and layout == "samples_as_rows":
        names = [h for j, h in enumerate(header) if j != label_idx]
    return Dataset(X, truth, names, {"source": str(path), "layout": layout,
                                     "label_column": label_column})


def save_csv(ds, path, header=True):
    """Write ``ds`` one sample per row; ``repr`` floats so a reload is bitwise equal."""
    names = ds.feature_names or [f"x{j}" for j in range(ds.n_features)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if header:
            writer.writerow(names)
        for row in ds.X.T:
            writer.writerow([repr(float(v)) for v in row])


def save_labels(labels, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "label"])
        for i, lab in enumerate(labels):
            writer.writerow([i, lab])


def load_labels(path):
    """Read an ``index,label`` file (header optional) or a single label column."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ValueError(f"{path}: empty label file")
    if rows[0][-1].strip().lower() == "label":
        rows = rows[1:]
    out = []
    for r in rows:
        cell = r[-1].strip()
        try:
            value = float(cell)
            out.append(int(value) if value == int(value) else value)
        except ValueError:
            out.append(cell)
    return np.array(out)


def standardize(ds):
    """Z-score each feature (population variance); constant features become zero."""
    X = ds.X
    mean = X.mean(axis=1, keepdims=True)
    std = X.std(axis=1, keepdims=True)
    constant = std[:, 0] <= 1e-12 * np.maximum(1.0, np.abs(mean[:, 0]))
    if constant.any():
        warnings.warn(f"{int(constant.sum())} constant feature(s) set to zero", stacklevel=2)
    std[constant] = 1.0
    Z = (X - mean) / std
    Z[constant] = 0.0
    return replace(ds, X=Z, provenance={**ds.provenance, "standardized": True,
                                        "constant_features": np.flatnonzero(constant).tolist()})


def synth_clusters(c, n_per_class, d, subspace_dim, separation, sigma, seed=0):
    """Gaussian clusters whose means live in a random ``subspace_dim``-dim subspace.

    With ``c <= subspace_dim`` the means are scaled coordinate vectors of that
    subspace, so every pair sits exactly ``separation`` apart; otherwise they
    are random directions of the same radius. ``n_per_class`` is one size for
    every class or a sequence of ``c`` sizes. Isotropic noise of standard
    deviation ``sigma`` is added in all ``d`` dimensions.
    """
    c = check_count(c, "c")
    sizes = np.broadcast_to(np.asarray(n_per_class), (c,))
    for size in sizes:
        check_count(int(size), "n_per_class")
    d = check_count(d, "d")
    subspace_dim = check_count(subspace_dim, "subspace_dim", high=d)
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((d, subspace_dim)))
    radius = separation / np.sqrt(2.0)
    if c <= subspace_dim:
        coords = radius * np.eye(subspace_dim)[:c]
    else:
        dirs = rng.standard_normal((c, subspace_dim))
        coords = radius * dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
    means = basis @ coords.T
    truth = np.repeat(np.arange(c), sizes)
    X = means[:, truth] + sigma * rng.standard_normal((d, truth.size))
    return Dataset(X, truth, None, {
        "source": "synth_clusters", "c": c, "n_per_class": sizes.tolist(), "d": d,
        "subspace_dim": subspace_dim, "separation": float(separation),
        "sigma": float(sigma), "seed": seed,
    })


def inject_outliers(ds, spec):
    """Multiply a seeded random ``fraction`` of samples (or entries) by 1.5.

    The corrupted indices are recorded in ``provenance["outlier_indices"]``:
    sample indices for ``scope="samples"``, flat ``(feature, sample)`` pairs
    for ``scope="entries"``.
    """
    if spec.kind != "outlier":
        raise ValueError(f"expected an outlier spec, got kind={spec.kind!r}")
    rng = np.random.default_rng(spec.seed)
    X = ds.X.copy()
    if spec.scope == "samples":
        k = int(round(spec.fraction * ds.n_samples))
        idx = np.sort(rng.choice(ds.n_samples, size=k, replace=False))
        X[:, idx] *= 1.5
        recorded = idx.tolist()
    else:
        k = int(round(spec.fraction * X.size))
        flat = np.sort(rng.choice(X.size, size=k, replace=False))
        rows, cols = np.unravel_index(flat, X.shape)
        X[rows, cols] *= 1.5
        recorded = list(zip(rows.tolist(), cols.tolist()))
    prov = {**ds.provenance, "outlier_fraction": spec.fraction, "outlier_scope": spec.scope,
            "outlier_seed": spec.seed, "outlier_indices": recorded}
    return replace(ds, X=X, provenance=prov)


def signal_power(X):
    return float(np.mean(np.asarray(X, dtype=float) ** 2))


def inject_noise_snr(ds, snr_db, seed=0):
    """Add white Gaussian noise with power ``signal_power / 10**(snr_db / 10)``."""
    power = signal_power(ds.X)
    if power <= 0:
        raise ValueError("cannot set an SNR for a zero-power signal")
    noise_power = power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = np.sqrt(noise_power) * rng.standard_normal(ds.X.shape)
    prov = {**ds.provenance, "snr_db": float(snr_db), "noise_seed": seed}
    return replace(ds, X=ds.X + noise, provenance=prov)


def sliding_window(signal, width, stride=1):
    """Cut a 1-D signal into windows; each window becomes one sample column."""
    signal = np.asarray(signal, dtype=float).ravel()
    width = check_count(width, "width")
    stride = check_count(stride, "stride")
    if width > signal.size:
        raise ValueError(f"window width {width} exceeds signal length {signal.size}")
    count = (signal.size - width) // stride + 1
    starts = stride * np.arange(count)
    X = signal[starts[None, :] + np.arange(width)[:, None]]
    return Dataset(X, None, None, {"source": "sliding_window", "width": width,
                                   "stride": stride, "offsets": starts.tolist()})
