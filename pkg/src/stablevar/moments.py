"""Sample moments and the forwards/backwards residual criteria."""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .linalg import spd_factor, spd_solve

__all__ = [
    "SampleMoments",
    "build_data_matrices",
    "sample_moments",
    "moments_from_trajectory",
    "residual_forward",
    "residual_backward",
    "criterion_j",
]


@dataclass(frozen=True)
class SampleMoments:
    """Second moments ``S_ij = Y_i Y_j' / T`` of the lagged data blocks.

    ``S00`` and ``S11`` are symmetrized; ``S10`` is stored as computed and
    ``S01`` is its transpose.
    """

    n: int
    T: int
    S00: np.ndarray
    S11: np.ndarray
    S10: np.ndarray

    @property
    def S01(self):
        return self.S10.T

    @classmethod
    def from_matrices(cls, S00, S11, S10, T=1):
        """Build moments directly from given matrices (no data)."""
        S00 = np.array(S00, dtype=float, ndmin=2)
        S11 = np.array(S11, dtype=float, ndmin=2)
        S10 = np.array(S10, dtype=float, ndmin=2)
        n = S00.shape[0]
        for name, M in (("S00", S00), ("S11", S11), ("S10", S10)):
            if M.shape != (n, n):
                raise InvalidInput(f"{name} must be {n}x{n}, got {M.shape}")
            if not np.all(np.isfinite(M)):
                raise InvalidInput(f"{name} has non-finite entries")
        return cls(n=n, T=int(T), S00=0.5 * (S00 + S00.T), S11=0.5 * (S11 + S11.T), S10=S10)


def build_data_matrices(traj):
    """Return ``(Y0, Y1)``: columns ``y_0..y_{T-1}`` and ``y_1..y_T``."""
    if traj.T < 1:
        raise InvalidInput("trajectory needs at least two points")
    Y = traj.y.T
    return Y[:, :-1], Y[:, 1:]


def sample_moments(Y0, Y1):
    """Sufficient statistics from ``n x T`` data matrices."""
    Y0 = np.asarray(Y0, dtype=float)
    Y1 = np.asarray(Y1, dtype=float)
    if Y0.ndim != 2 or Y0.shape != Y1.shape:
        raise InvalidInput(f"Y0 {Y0.shape} and Y1 {Y1.shape} must be equal 2-D shapes")
    n, T = Y0.shape
    if T == 0:
        raise InvalidInput("T must be at least 1")
    S00 = (Y0 @ Y0.T) / T
    S11 = (Y1 @ Y1.T) / T
    S10 = (Y1 @ Y0.T) / T
    return SampleMoments(
        n=n, T=T, S00=0.5 * (S00 + S00.T), S11=0.5 * (S11 + S11.T), S10=S10
    )


def moments_from_trajectory(traj):
    return sample_moments(*build_data_matrices(traj))


def residual_forward(S, F):
    """Forwards residual matrix ``S11 - F S01 - S10 F' + F S00 F'``."""
    F = np.asarray(F, dtype=float)
    FS01 = F @ S.S01
    R = S.S11 - FS01 - FS01.T + F @ S.S00 @ F.T
    return 0.5 * (R + R.T)


def _backward_matrix(F, P):
    """``P F' P^{-1}`` via an SPD solve: it is the transpose of ``P^{-1} F P``."""
    fac = spd_factor(P, "P")
    return spd_solve(fac, np.asarray(F, dtype=float) @ P).T


def residual_backward(S, F, P):
    """Backwards residual matrix with ``F_b = P F' P^{-1}``."""
    P = np.asarray(P, dtype=float)
    Fb = _backward_matrix(F, P)
    FbS10 = Fb @ S.S10
    R = S.S00 - FbS10 - FbS10.T + Fb @ S.S11 @ Fb.T
    return 0.5 * (R + R.T)


def criterion_j(S, F, P):
    """Forwards-backwards criterion ``trace(P^{-1} (S_wf(F) + S_wb(F; P)))``."""
    P = np.asarray(P, dtype=float)
    fac = spd_factor(P, "P")
    total = residual_forward(S, F) + residual_backward(S, F, P)
    return float(np.trace(spd_solve(fac, total)))
