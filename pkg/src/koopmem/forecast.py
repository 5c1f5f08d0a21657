"""End-to-end forecaster: sliding EDMD per window, with optional episodic recall."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dictionary import SIGMA_FLOOR, build_dictionary
from .edmd import (FIT_REL_TOL, MAGNITUDE_CAP, DecompositionError, edmd_fit,
                   extract_signature, predict_sliding_detail)
from .memory import MatchResult, MemoryBank
from .series import TimeSeries, delay_embed, window_pair

ANCHOR_FLOOR = 1e-12


@dataclass(frozen=True)
class ForecastConfig:
    """Hyperparameters of one forecasting run.

    eps_v defaults to eps_lambda * (n_delays + 1) when left unset; n_keep
    defaults to min(omega, lifted dictionary dimension). mode selects pure
    sliding EDMD or memory-augmented prediction.
    """

    omega: int = 5
    delta: int = 5
    n_delays: int = 1
    eps_lambda: float = 0.05
    eps_v: float | None = None
    n_rbf: int = 10
    n_keep: int | None = None
    rescale_enabled: bool = False
    capacity: int | None = None
    mode: str = "memory"
    sigma_floor: float = SIGMA_FLOOR
    rel_tol: float = FIT_REL_TOL
    reconstruction_tol: float = 1e-6
    magnitude_cap: float = MAGNITUDE_CAP
    anchor_floor: float = ANCHOR_FLOOR

    def __post_init__(self):
        if self.omega < 1:
            raise ValueError("omega must be >= 1")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if self.n_delays < 0:
            raise ValueError("n_delays must be >= 0")
        if not self.eps_lambda > 0:
            raise ValueError("eps_lambda must be positive")
        if self.eps_v is not None and not self.eps_v > 0:
            raise ValueError("eps_v must be positive")
        if self.mode not in ("sliding", "memory"):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def resolved_eps_v(self) -> float:
        if self.eps_v is not None:
            return self.eps_v
        return self.eps_lambda * (self.n_delays + 1)

    def resolved_n_keep(self, lifted_dim: int) -> int:
        if self.n_keep is not None:
            return self.n_keep
        return min(self.omega, lifted_dim)

    @property
    def min_series_length(self) -> int:
        return self.omega + self.n_delays + self.delta + 1


@dataclass(frozen=True)
class ForecastRecord:
    """One prediction issued at index t for index t + delta."""

    t: int
    target_t: int
    prediction: float
    source: str  # "memory" or "sliding"
    match: MatchResult | None = None
    overflow_flag: bool = False
    fallback_flag: bool = False
    rescale_clamped: bool = False

    @property
    def flags(self) -> str:
        parts = [name for name, on in (("overflow", self.overflow_flag),
                                       ("fallback", self.fallback_flag),
                                       ("rescale_clamped", self.rescale_clamped)) if on]
        return "|".join(parts)


def recall_prediction(values: np.ndarray, match: MatchResult, delta: int,
                      current_anchor: float, recalled_anchor: float,
                      rescale: bool, anchor_floor: float = ANCHOR_FLOOR):
    """Recalled-future prediction y_{t_min + delta}, optionally rescaled.

    With rescaling on, the recalled value is multiplied by the ratio of the
    current window anchor to the recalled window anchor; a recalled anchor
    below anchor_floor forces the ratio to 1 and flags the record.

    Returns (prediction, clamped_flag).
    """
    target = match.t_min + delta
    if target >= len(values):
        raise ValueError("recalled future extends beyond the series")
    value = float(values[target])
    if not rescale:
        return value, False
    if abs(recalled_anchor) < anchor_floor:
        return value, True
    return value * (current_anchor / recalled_anchor), False


def run(config: ForecastConfig, series: TimeSeries,
        bank: MemoryBank | None = None) -> list[ForecastRecord]:
    """Run the forecaster over the whole series.

    One record is issued per t in [omega + n_delays, m - delta - 1]. Each
    step fits EDMD on the current window, extracts its signature, predicts
    (recalling a matched past episode in memory mode, spectral forecast
    otherwise) and only then stores the signature, so a window never
    matches itself. A pre-populated bank may be passed for warm restarts.
    """
    m = len(series)
    if m < config.min_series_length:
        raise ValueError(
            f"series of length {m} too short; need >= {config.min_series_length}")
    values = series.values
    embedded = delay_embed(series, config.n_delays)
    if bank is None:
        bank = MemoryBank(capacity=config.capacity)

    records: list[ForecastRecord] = []
    prev_sig = None
    eps_v = config.resolved_eps_v
    for t in range(config.omega + config.n_delays, m - config.delta):
        sig = None
        try:
            pair = window_pair(embedded, t, config.omega)
            wstart = t - config.omega - config.n_delays
            window_raw = values[wstart:t + 1]
            dic = build_dictionary(window_raw, n_rbf=config.n_rbf,
                                   n_delays=config.n_delays,
                                   sigma_floor=config.sigma_floor)
            model = edmd_fit(pair, dic, rel_tol=config.rel_tol)
            state = embedded[t - config.n_delays]
            sig = extract_signature(model, dic.lift(state), state,
                                    config.resolved_n_keep(dic.lifted_dim),
                                    t=t, anchor=float(values[t]))
        except DecompositionError:
            sig = None

        if sig is None:
            # window operator was defective: reuse the last viable window's
            # spectrum, advanced far enough to still target t + delta
            if prev_sig is not None:
                horizon = config.delta + (t - prev_sig.t)
                value, _, overflow = predict_sliding_detail(
                    prev_sig, horizon, config.magnitude_cap)
            else:
                value, overflow = float(values[t]), False  # persistence
            records.append(ForecastRecord(
                t=t, target_t=t + config.delta, prediction=value,
                source="sliding", overflow_flag=overflow, fallback_flag=True))
            continue

        match = None
        if config.mode == "memory":
            match = bank.find_match(sig, t, config.delta,
                                    config.eps_lambda, eps_v)
        if match is not None:
            recalled_anchor = bank.get(match.t_min).signature.anchor
            value, clamped = recall_prediction(
                values, match, config.delta, sig.anchor, recalled_anchor,
                config.rescale_enabled, config.anchor_floor)
            records.append(ForecastRecord(
                t=t, target_t=t + config.delta, prediction=value,
                source="memory", match=match, rescale_clamped=clamped))
        else:
            value, _, overflow = predict_sliding_detail(
                sig, config.delta, config.magnitude_cap)
            records.append(ForecastRecord(
                t=t, target_t=t + config.delta, prediction=value,
                source="sliding", overflow_flag=overflow))

        if config.mode == "memory":
            bank.add(sig)
        prev_sig = sig
    return records
