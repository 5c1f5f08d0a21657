"""Evaluation metrics: median relative error and median relative prediction improvement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

REL_FLOOR = 1e-9


@dataclass(frozen=True)
class ErrorSummary:
    median_abs_error: float
    median_rel_error_pct: float
    n_points: int
    n_excluded: int = 0


def absolute_errors(truth_values: np.ndarray, records) -> np.ndarray:
    """Per-record |truth - prediction|, in record order."""
    truth_values = np.asarray(truth_values, dtype=float)
    return np.array([abs(truth_values[r.target_t] - r.prediction)
                     for r in records])


def median_relative_error(truth_values: np.ndarray, records,
                          rel_floor: float = REL_FLOOR) -> ErrorSummary:
    """Median of per-point |error| / |truth| as a percentage.

    Target values with magnitude below rel_floor are excluded from the
    relative median (and counted in n_excluded) to avoid dividing by
    near-zero truth.
    """
    if not records:
        raise ValueError("no records to evaluate")
    truth_values = np.asarray(truth_values, dtype=float)
    truths = np.array([truth_values[r.target_t] for r in records])
    preds = np.array([r.prediction for r in records])
    abs_err = np.abs(truths - preds)
    usable = np.abs(truths) >= rel_floor
    n_excluded = int((~usable).sum())
    if not usable.any():
        raise ValueError("no evaluable points above rel_floor")
    rel = abs_err[usable] / np.abs(truths[usable])
    return ErrorSummary(median_abs_error=float(np.median(abs_err)),
                        median_rel_error_pct=float(100.0 * np.median(rel)),
                        n_points=int(usable.sum()),
                        n_excluded=n_excluded)


def improvement(errors_baseline, errors_memory) -> float:
    """Median relative prediction improvement, in percent.

    100 * (median |baseline error| / median |memory error| - 1); positive
    when the memory-based predictions beat the baseline. Returns +inf when
    the memory median is exactly zero while the baseline's is not.
    """
    errors_baseline = np.asarray(errors_baseline, dtype=float)
    errors_memory = np.asarray(errors_memory, dtype=float)
    if errors_baseline.size == 0 or errors_memory.size == 0:
        raise ValueError("error sequences must be nonempty")
    if errors_baseline.size != errors_memory.size:
        raise ValueError("error sequences must cover the same evaluation points")
    med_base = float(np.median(np.abs(errors_baseline)))
    med_mem = float(np.median(np.abs(errors_memory)))
    if med_mem == 0.0:
        return 0.0 if med_base == 0.0 else math.inf
    return 100.0 * (med_base / med_mem - 1.0)
