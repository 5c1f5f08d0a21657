"""Windowed EDMD: operator fit, spectral signature extraction, sliding prediction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dictionary import Dictionary
from .series import SnapshotPair

REL_TOL = 1e-10
# pinv truncation for the Gram solve in edmd_fit. Looser than the generic
# pseudoinverse default on purpose: near-collinear RBF directions inside a
# short window otherwise inject noise-rank eigenvalues that destabilize the
# spectral signatures across repeats of the same dynamics.
FIT_REL_TOL = 1e-4
RESIDUAL_TOL = 1e-8
MAGNITUDE_CAP = 1e12


class DecompositionError(RuntimeError):
    """Eigendecomposition of the window operator failed; window is match-ineligible."""


def pseudoinverse(M: np.ndarray, rel_tol: float = REL_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values below rel_tol * sigma_max dropped."""
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix must be finite")
    return np.linalg.pinv(M, rcond=rel_tol)


@dataclass(frozen=True)
class KoopmanModel:
    """One window's approximated Koopman operator and its eigendecomposition.

    K acts on lifted column vectors: lift(y) ~= K @ lift(x). state_slice
    picks the identity coordinates out of the lifted space (the state
    readout); eig_ok marks eigenpairs passing the residual check
    ||K xi - lambda xi|| <= residual_tol * max(1, ||K||_F) * ||xi||.
    """

    K: np.ndarray
    eigenvalues: np.ndarray
    right_eigenvectors: np.ndarray
    state_slice: slice
    eig_ok: np.ndarray

    @property
    def lifted_dim(self) -> int:
        return self.K.shape[0]


@dataclass(frozen=True)
class SpectralSignature:
    """Retained eigenvalues plus scaled Koopman modes for one window.

    eigenvalues is length n_keep, sorted by descending modulus (ties by
    ascending argument, then ascending imaginary part) and zero-padded when
    the operator yields fewer usable pairs. Row i of scaled_modes is the
    amplitude-weighted mode restricted to the state coordinates; summing
    rows reconstructs the current embedded state at horizon 0. anchor is
    the window's current raw value x_t, kept for rescaled recall.
    """

    eigenvalues: np.ndarray
    scaled_modes: np.ndarray
    t: int = 0
    anchor: float = 0.0
    fallback: bool = False

    def __post_init__(self):
        if len(self.eigenvalues) != self.scaled_modes.shape[0]:
            raise ValueError("eigenvalues and scaled_modes disagree on n_keep")

    @property
    def n_keep(self) -> int:
        return len(self.eigenvalues)

    @property
    def state_dim(self) -> int:
        return self.scaled_modes.shape[1]


def edmd_fit(pair: SnapshotPair, dic: Dictionary, rel_tol: float = FIT_REL_TOL,
             residual_tol: float = RESIDUAL_TOL) -> KoopmanModel:
    """Fit the window operator K = (G^+ A)^T and eigendecompose it.

    G and A are the conjugate-transpose Gram products averaged over the
    window's column pairs; the transpose reorients K so it advances lifted
    column vectors one step.
    """
    if not dic.include_identity:
        raise ValueError("forecasting requires identity coordinates in the dictionary")
    PX = dic.lift_many(pair.X.T)  # rows are lifted snapshots
    PY = dic.lift_many(pair.Y.T)
    m = pair.omega
    G = PX.conj().T @ PX / m
    A = PX.conj().T @ PY / m
    K = (pseudoinverse(G, rel_tol) @ A).T
    try:
        eigenvalues, eigenvectors = np.linalg.eig(K)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(str(exc)) from None
    if not (np.all(np.isfinite(eigenvalues)) and np.all(np.isfinite(eigenvectors))):
        raise DecompositionError("non-finite eigendecomposition")

    scale = residual_tol * max(1.0, np.linalg.norm(K))
    resid = np.linalg.norm(K @ eigenvectors - eigenvectors * eigenvalues, axis=0)
    norms = np.linalg.norm(eigenvectors, axis=0)
    eig_ok = resid <= scale * np.maximum(norms, np.finfo(float).tiny)
    if not eig_ok.any():
        raise DecompositionError("no eigenpair passes the residual check")

    d = dic.state_dim
    return KoopmanModel(K=K, eigenvalues=eigenvalues,
                        right_eigenvectors=eigenvectors,
                        state_slice=slice(dic.lifted_dim - d, dic.lifted_dim),
                        eig_ok=eig_ok)


def _signature_sort(eigenvalues: np.ndarray, scaled_modes: np.ndarray):
    """Canonical order: descending |lambda|, then ascending arg, then ascending imag."""
    order = np.lexsort((eigenvalues.imag, np.angle(eigenvalues),
                        -np.abs(eigenvalues)))
    return eigenvalues[order], scaled_modes[order]


def extract_signature(model: KoopmanModel, current_lifted: np.ndarray,
                      current_state: np.ndarray, n_keep: int,
                      t: int = 0, anchor: float = 0.0) -> SpectralSignature:
    """Scale the model's modes against the current lifted state and retain n_keep pairs.

    Amplitudes solve right_eigenvectors @ a = current_lifted in least
    squares; retention ranks pairs by |a_i * lambda_i| so high-modulus
    noise directions with negligible amplitude are pruned.
    """
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")
    amps = pseudoinverse(model.right_eigenvectors) @ current_lifted.astype(complex)
    weights = np.abs(amps * model.eigenvalues)
    weights[~model.eig_ok] = -np.inf
    n_avail = int(model.eig_ok.sum())
    n_take = min(n_keep, n_avail)
    keep = np.argpartition(-weights, n_take - 1)[:n_take]

    eigenvalues = model.eigenvalues[keep]
    modes = amps[keep, None] * model.right_eigenvectors[model.state_slice, keep].T
    eigenvalues, modes = _signature_sort(eigenvalues, modes)

    if n_take < n_keep:
        pad = n_keep - n_take
        eigenvalues = np.concatenate([eigenvalues, np.zeros(pad, complex)])
        modes = np.vstack([modes, np.zeros((pad, modes.shape[1]), complex)])
    return SpectralSignature(eigenvalues=eigenvalues, scaled_modes=modes,
                             t=t, anchor=float(anchor))


def predict_sliding_detail(sig: SpectralSignature, delta: int,
                           magnitude_cap: float = MAGNITUDE_CAP):
    """Spectral forecast delta steps ahead.

    Returns (value, imag_residual, overflow) where value is the real part
    of the current-value slot of sum_i lambda_i^delta * mode_i, clamped to
    +-magnitude_cap on overflow.
    """
    if delta < 1:
        raise ValueError("delta must be >= 1")
    with np.errstate(over="ignore", invalid="ignore"):
        powered = sig.eigenvalues ** delta
        state = powered @ sig.scaled_modes
    current = state[-1]  # last embedding coordinate holds the current value
    re, im = float(np.real(current)), float(np.imag(current))
    overflow = not np.isfinite(re) or abs(re) > magnitude_cap
    value = float(np.clip(np.nan_to_num(re, nan=magnitude_cap,
                                        posinf=magnitude_cap,
                                        neginf=-magnitude_cap),
                          -magnitude_cap, magnitude_cap))
    imag_residual = abs(im) if np.isfinite(im) else np.inf
    return value, imag_residual, overflow


def predict_sliding(sig: SpectralSignature, delta: int,
                    magnitude_cap: float = MAGNITUDE_CAP) -> float:
    """Real-valued spectral forecast delta steps ahead (see predict_sliding_detail)."""
    return predict_sliding_detail(sig, delta, magnitude_cap)[0]
