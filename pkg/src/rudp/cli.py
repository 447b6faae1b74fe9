"""Command line entry point: ``rudp {generate,fit,evaluate,benchmark}``.

Settings resolve in three layers: built-in defaults, then a flat JSON
config file (``--config``), then flags given on the command line.
"""

import argparse
import csv
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import benchmark as bench
from . import data as datamod
from .core import ConvergenceError, fit
from .metrics import evaluate

log = logging.getLogger("rudp")

DEFAULTS = {
    "data": None, "layout": "rows", "label_col": None, "standardize": True,
    "lambda": 0.1, "beta": 0.1, "dim": 5, "clusters": 3, "knn": 5,
    "max_iters": 100, "tol": 1e-5, "seed": 0, "outlier_frac": 0.0, "snr_db": None,
    "repeats": 10, "baselines": ["kmeans", "pca"], "out_dir": ".", "workers": 1,
    **bench.SYNTH_DEFAULTS,
}

# flag name -> (key, converter, help)
FLAGS = {
    "--data": ("data", str, "CSV file; omit to use synthetic clusters"),
    "--layout": ("layout", str, "rows: one sample per row; columns: one per column"),
    "--label-col": ("label_col", str, "index or header name of the ground-truth column"),
    "--standardize": ("standardize", str, "on|off, z-score features before corruption"),
    "--lambda": ("lambda", float, "graph smoothness weight"),
    "--beta": ("beta", float, "entropy weight"),
    "--dim": ("dim", int, "projection dimension m"),
    "--clusters": ("clusters", int, "number of clusters c"),
    "--knn": ("knn", int, "neighbors used to pick graph bandwidths"),
    "--max-iters": ("max_iters", int, "outer sweep cap"),
    "--tol": ("tol", float, "relative objective change treated as converged"),
    "--seed": ("seed", int, "random seed (first seed for benchmark)"),
    "--outlier-frac": ("outlier_frac", float, "fraction of samples scaled by 1.5"),
    "--snr-db": ("snr_db", float, "add white noise at this SNR"),
    "--repeats": ("repeats", int, "seeds per benchmark sweep point"),
    "--baselines": ("baselines", str, "comma list from: kmeans, pca (or 'none')"),
    "--out-dir": ("out_dir", str, "output directory"),
    "--workers": ("workers", int, "parallel benchmark workers"),
    "--n-per-class": ("n_per_class", int, "synthetic samples per class"),
    "--features": ("features", int, "synthetic dimension d"),
    "--subspace-dim": ("subspace_dim", int, "dimension of the synthetic mean subspace"),
    "--separation": ("separation", float, "distance between synthetic cluster means"),
    "--sigma": ("sigma", float, "synthetic noise standard deviation"),
}

COMMAND_FLAGS = {
    "generate": ["--clusters", "--n-per-class", "--features", "--subspace-dim", "--separation",
                 "--sigma", "--seed", "--standardize", "--outlier-frac", "--snr-db", "--out-dir"],
    "fit": ["--data", "--layout", "--label-col", "--standardize", "--lambda", "--beta", "--dim",
            "--clusters", "--knn", "--max-iters", "--tol", "--seed", "--outlier-frac",
            "--snr-db", "--out-dir", "--n-per-class", "--features", "--subspace-dim",
            "--separation", "--sigma"],
    "benchmark": list(FLAGS),
}

# benchmark flags that accept a comma-separated list of sweep values
SWEEP_FLAGS = {"dim": "dim", "outlier_frac": "outlier_frac", "snr_db": "snr_db",
               "lambda": "lambda", "beta": "beta"}


def _on_off(value):
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("on", "true", "yes", "1"):
        return True
    if text in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {value!r}")


def _listed(value, convert):
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [v for v in str(value).split(",") if v.strip()]
    return [None if convert is float and str(v).strip().lower() == "none" else convert(v)
            for v in items]


def build_parser():
    parser = argparse.ArgumentParser(prog="rudp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, flags in COMMAND_FLAGS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=argparse.SUPPRESS, help="flat JSON settings file")
        for flag in flags:
            key, _, text = FLAGS[flag]
            # raw strings; conversion happens after the layers are merged
            p.add_argument(flag, dest=key, default=argparse.SUPPRESS, help=text)
    p = sub.add_parser("evaluate")
    p.add_argument("--pred", required=True, help="predicted labels CSV (index,label)")
    p.add_argument("--truth", required=True, help="ground-truth labels CSV (index,label)")
    p.add_argument("--out-dir", dest="out_dir", default=".")
    return parser


def resolve(args, command):
    """Merge defaults, the optional config file and explicit flags into one dict."""
    given = {k: v for k, v in vars(args).items() if k not in ("command", "verbose", "config")}
    settings = dict(DEFAULTS)
    if command == "generate":
        settings["standardize"] = False
    if getattr(args, "config", None):
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(loaded, dict):
            raise ValueError(f"{args.config}: config must be a flat JSON object")
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ValueError(f"{args.config}: unknown keys {unknown}")
        settings.update(loaded)
    settings.update(given)

    converters = {key: conv for key, conv, _ in FLAGS.values()}
    out = {}
    for key, value in settings.items():
        if key == "standardize":
            out[key] = _on_off(value)
        elif key == "baselines":
            names = _listed(value, str)
            out[key] = [] if names == ["none"] else names
        elif command == "benchmark" and key in SWEEP_FLAGS:
            out[key] = _listed(value, converters[key]) if value is not None else [None]
        elif value is None or key in ("data", "label_col", "layout", "out_dir"):
            out[key] = value
        else:
            out[key] = converters[key](value)
    return out


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=1, sort_keys=True, default=_jsonable),
                          encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def cmd_generate(cfg):
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    ds = bench.load_source({**cfg, "data": None})
    datamod.save_csv(ds, out / "data.csv")
    datamod.save_labels(ds.truth, out / "truth.csv")
    _write_json(out / "provenance.json", {"config": cfg, "provenance": ds.provenance,
                                          "n_samples": ds.n_samples,
                                          "n_features": ds.n_features})
    log.info("wrote %d samples x %d features to %s", ds.n_samples, ds.n_features, out)
    return 0


def cmd_fit(cfg):
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    ds = bench.load_source(cfg)
    hp = bench.hyperparams_from(cfg)
    result = fit(ds.X, hp)
    datamod.save_labels(result.labels, out / "labels.csv")
    with open(out / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "J", "relative_delta", "w_orth", "g_orth"])
        for row in result.objective_trace:
            writer.writerow([row.iteration, repr(row.objective), repr(row.relative_delta),
                             repr(row.w_orth), repr(row.g_orth)])
    summary = {
        "final_objective": result.objective_values[-1],
        "iterations": result.iterations_used,
        "converged": result.converged,
        "components_found": result.components_found,
        "seed": cfg["seed"],
        "config": cfg,
        "hyperparams": asdict(hp),
        "flags": [list(f) for f in result.flags],
    }
    if ds.truth is not None:
        summary["metrics"] = evaluate(result.labels, ds.truth).as_dict()
    _write_json(out / "summary.json", summary)
    log.info("J=%.6g after %d sweeps (converged=%s)", summary["final_objective"],
             result.iterations_used, result.converged)
    return 0


def cmd_evaluate(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pred = datamod.load_labels(args.pred)
    truth = datamod.load_labels(args.truth)
    report = evaluate(pred, truth)
    _write_json(out / "report.json", {**report.as_dict(), "pred": args.pred,
                                      "truth": args.truth, "n": int(len(pred))})
    np.savetxt(out / "confusion.csv", report.confusion, fmt="%d", delimiter=",")
    print(json.dumps(report.as_dict()))
    return 0


def cmd_benchmark(cfg):
    methods = ["rudp", *cfg["baselines"]]
    unknown = sorted(set(methods) - set(bench.METHODS))
    if unknown:
        raise ValueError(f"unknown baselines {unknown}; choose from kmeans, pca")
    sweeps = {k: cfg[k] for k in SWEEP_FLAGS}
    base = {k: v for k, v in cfg.items()
            if k not in SWEEP_FLAGS and k not in ("repeats", "baselines", "out_dir", "workers")}
    cells = bench.expand_cells(base, sweeps, methods, cfg["repeats"])
    log.info("running %d cells with %d worker(s)", len(cells), cfg["workers"])
    rows = bench.run_benchmark(cells, cfg["out_dir"], workers=cfg["workers"])
    failed = [r for r in rows if r["error"]]
    for r in failed:
        log.error("cell %s failed: %s", r["cell"], r["error"])
    return 1 if failed else 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "evaluate":
            return cmd_evaluate(args)
        cfg = resolve(args, args.command)
        return {"generate": cmd_generate, "fit": cmd_fit,
                "benchmark": cmd_benchmark}[args.command](cfg)
    except (ValueError, OSError, ConvergenceError) as exc:
        print(f"rudp {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
