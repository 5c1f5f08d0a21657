"""Sliding-window Koopman (EDMD) forecasting with an episodic memory of spectral signatures."""

__version__ = "0.1.0"

from .dictionary import Dictionary, build_dictionary
from .distances import SignatureDistance, mode_distance, signature_distance, wasserstein1
from .edmd import (DecompositionError, KoopmanModel, SpectralSignature,
                   edmd_fit, extract_signature, predict_sliding, pseudoinverse)
from .forecast import ForecastConfig, ForecastRecord, recall_prediction, run
from .memory import MatchResult, MemoryBank, MemoryRecord
from .metrics import ErrorSummary, absolute_errors, improvement, median_relative_error
from .series import (SnapshotPair, TimeSeries, delay_embed,
                     gen_piecewise_exponential, load_csv, window_pair, write_csv)

__all__ = [
    "Dictionary", "build_dictionary",
    "SignatureDistance", "mode_distance", "signature_distance", "wasserstein1",
    "DecompositionError", "KoopmanModel", "SpectralSignature",
    "edmd_fit", "extract_signature", "predict_sliding", "pseudoinverse",
    "ForecastConfig", "ForecastRecord", "recall_prediction", "run",
    "MatchResult", "MemoryBank", "MemoryRecord",
    "ErrorSummary", "absolute_errors", "improvement", "median_relative_error",
    "SnapshotPair", "TimeSeries", "delay_embed", "gen_piecewise_exponential",
    "load_csv", "window_pair", "write_csv",
]
