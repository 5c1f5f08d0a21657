"""Run artifacts: prediction CSVs, JSON summaries, and rendered figures."""
from __future__ import annotations

import csv
import dataclasses
import json
import math

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .forecast import ForecastConfig
from .metrics import median_relative_error

RECORD_COLUMNS = ["t", "target_t", "truth", "prediction", "source",
                  "d_lambda", "d_v", "flags"]


def config_as_dict(config: ForecastConfig) -> dict:
    d = dataclasses.asdict(config)
    d["eps_v_resolved"] = config.resolved_eps_v
    return d


def write_records_csv(path, records, truth_values):
    truth_values = np.asarray(truth_values, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_COLUMNS)
        for r in records:
            writer.writerow([
                r.t, r.target_t, repr(float(truth_values[r.target_t])),
                repr(r.prediction), r.source,
                "" if r.match is None else repr(r.match.d_lambda),
                "" if r.match is None else repr(r.match.d_v),
                r.flags,
            ])


def summarize_run(config: ForecastConfig, records, truth_values) -> dict:
    """Config echo plus error metrics and (in memory mode) match statistics."""
    summary = {
        "config": config_as_dict(config),
        "n_records": len(records),
    }
    err = median_relative_error(truth_values, records)
    summary["median_abs_error"] = err.median_abs_error
    summary["median_rel_error_pct"] = err.median_rel_error_pct
    summary["n_points"] = err.n_points
    summary["n_excluded"] = err.n_excluded
    if config.mode == "memory":
        n_memory = sum(1 for r in records if r.source == "memory")
        summary["n_memory_predictions"] = n_memory
        summary["match_rate"] = n_memory / len(records) if records else 0.0
    return summary


def write_summary_json(path, summary: dict):
    def _default(obj):
        if isinstance(obj, float) and math.isinf(obj):
            return "inf"
        raise TypeError(f"not serializable: {obj!r}")

    # map non-finite floats to strings so the JSON stays strict
    def _clean(obj):
        if isinstance(obj, dict):
            return {k: _clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [_clean(v) for v in obj]
        if isinstance(obj, float) and not math.isfinite(obj):
            return str(obj)
        return obj

    with open(path, "w") as fh:
        json.dump(_clean(summary), fh, indent=2, default=_default)
        fh.write("\n")


def write_compare_csv(path, recs_sliding, recs_memory, truth_values):
    """Per-step columns for both predictors, aligned on issue index t."""
    truth_values = np.asarray(truth_values, dtype=float)
    by_t = {r.t: r for r in recs_memory}
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "target_t", "truth", "pred_sliding", "pred_memory",
                         "err_sliding", "err_memory", "memory_source"])
        for rs in recs_sliding:
            rm = by_t.get(rs.t)
            if rm is None:
                continue
            truth = float(truth_values[rs.target_t])
            writer.writerow([
                rs.t, rs.target_t, repr(truth),
                repr(rs.prediction), repr(rm.prediction),
                repr(abs(truth - rs.prediction)),
                repr(abs(truth - rm.prediction)),
                rm.source,
            ])


def render_forecast_figure(path, records, truth_values, title="Forecast"):
    """Truth vs predictions over the target index."""
    truth_values = np.asarray(truth_values, dtype=float)
    targets = [r.target_t for r in records]
    preds = [r.prediction for r in records]
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(np.arange(len(truth_values)), truth_values, "k-", lw=1,
            label="truth")
    ax.plot(targets, preds, "C0-", lw=1, label="prediction")
    ax.set_xlabel("time step")
    ax.set_ylabel("value")
    ax.set_title(title)
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_compare_figures(outdir, recs_sliding, recs_memory, truth_values):
    """Render the comparison line plot and the per-step error plot.

    Returns the list of written figure paths.
    """
    truth_values = np.asarray(truth_values, dtype=float)
    by_t = {r.t: r for r in recs_memory}
    common = [(rs, by_t[rs.t]) for rs in recs_sliding if rs.t in by_t]
    targets = [rs.target_t for rs, _ in common]
    truth = truth_values[targets]
    pred_s = np.array([rs.prediction for rs, _ in common])
    pred_m = np.array([rm.prediction for _, rm in common])

    paths = []
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.plot(np.arange(len(truth_values)), truth_values, "k-", lw=1,
            label="truth")
    ax.plot(targets, pred_s, "C3-", lw=0.8, alpha=0.8, label="sliding EDMD")
    ax.plot(targets, pred_m, "C0-", lw=0.8, alpha=0.8, label="with memory")
    ax.set_xlabel("time step")
    ax.set_ylabel("value")
    ax.set_title("Predictions vs truth")
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    path = str(outdir / "compare_predictions.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)

    fig, ax = plt.subplots(figsize=(10, 3))
    ax.plot(targets, np.abs(truth - pred_s), "C3-", lw=0.8, alpha=0.8,
            label="sliding EDMD")
    ax.plot(targets, np.abs(truth - pred_m), "C0-", lw=0.8, alpha=0.8,
            label="with memory")
    ax.set_yscale("log")
    ax.set_xlabel("time step")
    ax.set_ylabel("absolute error")
    ax.set_title("Per-step absolute error")
    ax.legend(loc="best", frameon=False)
    fig.tight_layout()
    path = str(outdir / "compare_errors.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    paths.append(path)
    return paths
