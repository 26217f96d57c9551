"""The true VAR(1) system: stationary covariance, backwards model, simulation."""

from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import InvalidInput, UnstableMatrix
from .linalg import (
    _as_square,
    _check_floor,
    cholesky,
    spd_factor,
    spd_solve,
    spd_sqrt,
    spectral_radius,
    solve_dlyap,
    sym_eig,
)

__all__ = [
    "VarModel",
    "BackwardsModel",
    "Trajectory",
    "stationary_covariance",
    "backwards_model",
    "simulate",
    "INIT_MODES",
]

INIT_MODES = ("stationary", "zero")


@dataclass(frozen=True)
class VarModel:
    """Forwards model ``y_t = F y_{t-1} + w_t`` with ``cov(w_t) = Q``.

    ``Q`` must be symmetric positive definite. ``F`` may be unstable, but
    stationary quantities and simulation then raise :class:`UnstableMatrix`.
    """

    F: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        F = _as_square(self.F, "F")
        Q = _as_square(self.Q, "Q")
        if F.shape != Q.shape:
            raise InvalidInput(f"F {F.shape} and Q {Q.shape} differ in shape")
        Q = 0.5 * (Q + Q.T)
        _check_floor(sym_eig(Q).values, "Q")
        F.setflags(write=False)
        Q.setflags(write=False)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "Q", Q)

    @property
    def n(self):
        return self.F.shape[0]

    @property
    def spectral_radius(self):
        return spectral_radius(self.F)

    def is_stable(self):
        return self.spectral_radius < 1.0


@dataclass(frozen=True)
class BackwardsModel:
    """Time-reversed model ``y_{t-1} = F_b y_t + w_{b,t-1}``."""

    F_b: np.ndarray
    Q_b: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Observations ``y_0 .. y_T`` stored row-wise in a ``(T + 1, n)`` array."""

    y: np.ndarray
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim == 1:
            y = y[:, None]
        if y.ndim != 2 or y.shape[0] < 1:
            raise InvalidInput(f"trajectory must be (T+1, n), got shape {y.shape}")
        if not np.all(np.isfinite(y)):
            raise InvalidInput("trajectory has non-finite entries")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.y.shape[1]

    @property
    def T(self):
        """Number of transitions (rows minus one)."""
        return self.y.shape[0] - 1


def _require_stable(model):
    rho = model.spectral_radius
    if rho >= 1.0:
        raise UnstableMatrix(
            f"model is not stable (spectral radius {rho:.6g})", spectral_radius=rho
        )


def stationary_covariance(model, method="auto"):
    """Steady-state covariance ``Pi`` solving ``Pi = F Pi F' + Q``."""
    _require_stable(model)
    return solve_dlyap(model.F, model.Q, method=method)


def backwards_model(model):
    """Backwards transition ``F_b = Pi F' Pi^{-1}`` and ``Q_b = Pi - F_b Pi F_b'``."""
    Pi = stationary_covariance(model)
    fac = spd_factor(Pi, "Pi")
    # F_b' = Pi^{-1} F Pi
    F_b = spd_solve(fac, model.F @ Pi).T
    Q_b = Pi - F_b @ Pi @ F_b.T
    return BackwardsModel(F_b=F_b, Q_b=0.5 * (Q_b + Q_b.T))


def simulate(model, T, seed, init="stationary", backend=None):
    """Simulate ``T`` transitions of ``model``.

    Parameters
    ----------
    model : VarModel
        Must be stable.
    T : int
        Number of transitions; the trajectory has ``T + 1`` points.
    seed : int
        Seed for :func:`numpy.random.default_rng` (PCG64). The start
        ``z_0`` is drawn first as ``n`` standard normals, followed by a
        ``(T, n)`` block of innovations.
    init : {"stationary", "zero"}
        ``stationary`` draws ``y_0 = L z_0`` with ``L`` the Cholesky factor
        of the stationary covariance. ``zero`` sets ``y_0 = 0`` (the start
        ``z_0`` is still drawn so that innovations match across modes).
    backend : {"cython", "python"}, optional
        Kernel used for the recursion.

    Notes
    -----
    Innovations are ``Q^{1/2} z_t`` with the symmetric square root, so
    ``Q = I`` gives exactly the drawn standard normals.
    """
    if isinstance(T, bool) or int(T) != T or T < 1:
        raise InvalidInput(f"T must be a positive integer, got {T!r}")
    if init not in INIT_MODES:
        raise InvalidInput(f"init must be one of {INIT_MODES}, got {init!r}")
    T = int(T)
    _require_stable(model)
    n = model.n
    rng = np.random.default_rng(seed)
    z0 = rng.standard_normal(n)
    Z = rng.standard_normal((T, n))

    if init == "stationary":
        y0 = cholesky(stationary_covariance(model)) @ z0
    else:
        y0 = np.zeros(n)

    Q = model.Q
    if np.array_equal(Q, np.eye(n)):
        W = Z
    else:
        W = Z @ spd_sqrt(Q)  # Q^{1/2} is symmetric
    y = _backend.ar1_filter(model.F, W, y0, backend=backend)
    return Trajectory(y=y, seed=seed, meta={"init": init})
