"""Scalar time series: CSV ingestion, synthetic generation, delay embedding."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MISSING_MARKERS = ("", "NA")

# Regime multipliers of the piecewise exponential generator.
LAMBDA_CHOICES = (-1.0101, -0.99, 0.99, 1.0101)


class IngestError(ValueError):
    """Raised when a CSV cannot be turned into a valid TimeSeries."""


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled scalar observations.

    values are stored as a float64 array and must be finite; start_index is
    the time step of the first value (0 unless the series was truncated).
    """

    values: np.ndarray
    start_index: int = 0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("TimeSeries values must be one-dimensional")
        if not np.all(np.isfinite(vals)):
            raise ValueError("TimeSeries values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SnapshotPair:
    """Window matrices of delay-embedded states ending at t-1 (X) and t (Y).

    Columns are embedded states; Y is the one-step advance of X, so
    Y[:, k] == X[:, k + 1] for every interior column.
    """

    X: np.ndarray
    Y: np.ndarray
    t: int

    def __post_init__(self):
        if self.X.shape != self.Y.shape:
            raise ValueError("X and Y must have identical shape")

    @property
    def omega(self) -> int:
        return self.X.shape[1]

    @property
    def state_dim(self) -> int:
        return self.X.shape[0]


def load_csv(path, column=0, delimiter=",", interpolate=False,
             missing_markers=DEFAULT_MISSING_MARKERS) -> TimeSeries:
    """Read one column of a headered CSV as a TimeSeries.

    column may be a header name or a 0-based index. Missing markers are
    linearly interpolated in the interior and trimmed at the ends when
    interpolate is True; otherwise any missing value is an error.
    """
    markers = set(missing_markers)
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if isinstance(column, int):
            if not 0 <= column < len(header):
                raise IngestError(f"{path}: column index {column} out of range")
            col = column
        else:
            try:
                col = header.index(column)
            except ValueError:
                raise IngestError(f"{path}: no column named {column!r}") from None
        raw = []
        for row in reader:
            if not row:
                continue
            if col >= len(row):
                raise IngestError(f"{path}: short row {len(raw) + 1}")
            raw.append(row[col].strip())

    parsed: list[float | None] = []
    for i, cell in enumerate(raw, start=1):
        if cell in markers:
            if not interpolate:
                raise IngestError(f"missing value at row {i}")
            parsed.append(None)
            continue
        try:
            val = float(cell)
        except ValueError:
            raise IngestError(f"non-numeric value {cell!r} at row {i}") from None
        if not np.isfinite(val):
            raise IngestError(f"non-finite value at row {i}")
        parsed.append(val)

    if interpolate:
        # Trim leading/trailing gaps, interpolate interior ones.
        known = [i for i, v in enumerate(parsed) if v is not None]
        if not known:
            raise IngestError(f"{path}: no valid rows")
        parsed = parsed[known[0]:known[-1] + 1]
        idx = np.arange(len(parsed))
        mask = np.array([v is not None for v in parsed])
        vals = np.array([v if v is not None else np.nan for v in parsed])
        vals[~mask] = np.interp(idx[~mask], idx[mask], vals[mask])
    else:
        vals = np.asarray(parsed, dtype=float)

    if len(vals) < 2:
        raise IngestError(f"{path}: fewer than 2 valid rows")
    return TimeSeries(vals)


def write_csv(path, series: TimeSeries, labels=None, delimiter=","):
    """Write a TimeSeries (plus optional per-step lambda labels) as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        if labels is None:
            writer.writerow(["value"])
            for v in series.values:
                writer.writerow([repr(float(v))])
        else:
            if len(labels) != len(series):
                raise ValueError("labels length must match series length")
            writer.writerow(["value", "lambda"])
            for v, lam in zip(series.values, labels):
                writer.writerow([repr(float(v)), repr(float(lam))])


def gen_piecewise_exponential(steps, switch_period=10, eta=0.01, seed=0,
                              lambda_choices=LAMBDA_CHOICES):
    """Generate x_t = lambda_t * x_{t-1} * (1 + eta * xi), x_0 = 1.

    The multiplier is resampled uniformly from lambda_choices every
    switch_period steps, constrained to flip sign at each transition so
    the magnitude of x_t does not blow up. Returns (TimeSeries, labels)
    where labels holds the per-step multiplier.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if switch_period < 1:
        raise ValueError("switch_period must be >= 1")
    if eta < 0:
        raise ValueError("eta must be >= 0")
    rng = np.random.default_rng(seed)
    choices = np.asarray(lambda_choices, dtype=float)

    labels = np.empty(steps)
    lam = rng.choice(choices)
    values = np.empty(steps)
    values[0] = 1.0
    labels[0] = lam
    for t in range(1, steps):
        if t % switch_period == 0:
            new = rng.choice(choices)
            while np.sign(new) == np.sign(lam):
                new = rng.choice(choices)
            lam = new
        labels[t] = lam
        noise = 1.0 + eta * rng.standard_normal()
        values[t] = lam * values[t - 1] * noise
    return TimeSeries(values), labels


def delay_embed(series: TimeSeries, n_delays: int) -> np.ndarray:
    """Delay-embed a series into states [x_{t-n_delays}, ..., x_t].

    Returns an array of shape (len(series) - n_delays, n_delays + 1);
    row j is the embedded state at time t = j + n_delays, ordered
    oldest-first so the last coordinate is the current raw value.
    """
    if n_delays < 0:
        raise ValueError("n_delays must be >= 0")
    if len(series) <= n_delays:
        raise ValueError(
            f"series of length {len(series)} too short for {n_delays} delays")
    return np.lib.stride_tricks.sliding_window_view(series.values, n_delays + 1).copy()


def window_pair(embedded: np.ndarray, t: int, omega: int) -> SnapshotPair:
    """Extract the snapshot pair (X, Y) of omega embedded states ending at t-1 / t."""
    if omega < 1:
        raise ValueError("omega must be >= 1")
    n_delays = embedded.shape[1] - 1
    if t < omega + n_delays:
        raise ValueError(f"insufficient history for window ending at t={t}")
    last = t - n_delays
    if last >= len(embedded):
        raise ValueError(f"t={t} beyond end of series")
    # embedded row j holds the state at time j + n_delays
    Y = embedded[last - omega + 1:last + 1].T
    X = embedded[last - omega:last].T
    return SnapshotPair(X=X, Y=Y, t=t)
