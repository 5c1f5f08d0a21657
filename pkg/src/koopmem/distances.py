"""Distances between spectral signatures: Wasserstein-1 on eigenvalues, normalized Euclidean on modes."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .edmd import SpectralSignature


@dataclass(frozen=True)
class SignatureDistance:
    d_lambda: float
    d_v: float

    @property
    def combined(self) -> float:
        return self.d_lambda + self.d_v


def wasserstein1(a, b) -> float:
    """W_1 between two equal-size eigenvalue multisets on the complex plane.

    Uniform empirical measures, Euclidean ground metric, solved by linear
    sum assignment; the optimal matching cost is averaged over the set size.
    """
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.shape != b.shape:
        raise ValueError(f"eigenvalue sets differ in size: {a.shape} vs {b.shape}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / len(a))


def mode_distance(Va, Vb) -> float:
    """||Va - Vb||_F / (||Va||_F + ||Vb||_F), with 0/0 defined as 0."""
    Va = np.asarray(Va, dtype=complex)
    Vb = np.asarray(Vb, dtype=complex)
    if Va.shape != Vb.shape:
        raise ValueError(f"mode matrices differ in shape: {Va.shape} vs {Vb.shape}")
    denom = np.linalg.norm(Va) + np.linalg.norm(Vb)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(Va - Vb) / denom)


def signature_distance(sa: SpectralSignature, sb: SpectralSignature) -> SignatureDistance:
    """Eigenvalue and mode distances between two signatures of equal layout."""
    if sa.fallback or sb.fallback:
        raise ValueError("fallback-flagged signatures cannot be compared")
    return SignatureDistance(d_lambda=wasserstein1(sa.eigenvalues, sb.eigenvalues),
                             d_v=mode_distance(sa.scaled_modes, sb.scaled_modes))
