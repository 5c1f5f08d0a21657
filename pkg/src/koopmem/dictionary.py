"""Observable dictionary: Gaussian RBFs over the current window plus identity coordinates."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_FLOOR = 1e-8


@dataclass(frozen=True)
class Dictionary:
    """Window-adapted lifting dictionary.

    centers has shape (n_rbf, dim) and may be empty (identity-only
    dictionary); sigma is the shared isotropic bandwidth. Lifted vectors
    are [rbf_1, ..., rbf_n, x_1, ..., x_dim] with the identity block last
    when include_identity is set.
    """

    centers: np.ndarray
    sigma: float
    include_identity: bool = True

    def __post_init__(self):
        centers = np.atleast_2d(np.asarray(self.centers, dtype=float))
        if centers.size == 0:
            centers = centers.reshape(0, max(1, centers.shape[-1]))
        if not np.all(np.isfinite(centers)):
            raise ValueError("dictionary centers must be finite")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        centers.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        if self.lifted_dim < 1:
            raise ValueError("dictionary must contain at least one observable")

    @property
    def n_rbf(self) -> int:
        return self.centers.shape[0]

    @property
    def state_dim(self) -> int:
        return self.centers.shape[1]

    @property
    def lifted_dim(self) -> int:
        return self.n_rbf + (self.state_dim if self.include_identity else 0)

    def lift(self, state: np.ndarray) -> np.ndarray:
        """Lift one embedded state into observable space."""
        return self.lift_many(np.asarray(state, dtype=float)[None, :])[0]

    def lift_many(self, states: np.ndarray) -> np.ndarray:
        """Lift rows of `states`; returns an (n_states, lifted_dim) array."""
        states = np.asarray(states, dtype=float)
        if states.ndim != 2 or states.shape[1] != self.state_dim:
            raise ValueError(
                f"state dimension {states.shape} does not match centers "
                f"dimension {self.state_dim}")
        blocks = []
        if self.n_rbf:
            sq = ((states[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=2)
            blocks.append(np.exp(-sq / (2.0 * self.sigma ** 2)))
        if self.include_identity:
            blocks.append(states)
        return np.hstack(blocks)


def build_dictionary(window_raw, n_rbf=10, n_delays=0, sigma_floor=SIGMA_FLOOR,
                     include_identity=True) -> Dictionary:
    """Build the dictionary for one sliding window.

    Scalar centers are evenly spaced over [min, max] of the window's raw
    values and replicated across all embedding coordinates. The bandwidth
    adapts to the window: sigma = max |value|, floored at sigma_floor so an
    all-zero window cannot divide by zero.
    """
    window_raw = np.asarray(window_raw, dtype=float)
    if window_raw.size == 0 or not np.all(np.isfinite(window_raw)):
        raise ValueError("window_raw must be nonempty and finite")
    if n_rbf < 1:
        raise ValueError("n_rbf must be >= 1")
    if n_delays < 0:
        raise ValueError("n_delays must be >= 0")
    scalar_centers = np.linspace(window_raw.min(), window_raw.max(), n_rbf)
    dim = n_delays + 1
    centers = np.repeat(scalar_centers[:, None], dim, axis=1)
    sigma = max(float(np.abs(window_raw).max()), sigma_floor)
    return Dictionary(centers=centers, sigma=sigma,
                      include_identity=include_identity)
