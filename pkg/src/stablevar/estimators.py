"""Closed-form VAR(1) transition-matrix estimators.

Full rank:

* ``fit_ls``           least squares ``S10 S00^{-1}``; may be unstable.
* ``fit_fb_sylvester`` forwards-backwards minimizer for a weight ``P``.
* ``fit_fb11``         forwards-backwards with ``P = S11``, closed form,
                       always stable.
* ``fit_backward_ls``  least squares for the backwards model.

Reduced rank ``m``:

* ``fit_rls`` reduced-rank least squares plus its noise covariance.
* ``fit_rfb`` reduced-rank forwards-backwards; stable for every ``m``.
"""

import functools
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np

from .errors import InvalidInput, InvalidRank
from .linalg import (
    spd_factor,
    spd_solve,
    spd_sqrt_pair,
    solve_sylvester,
    spectral_radius,
    sym_eig,
)

__all__ = [
    "Method",
    "Estimate",
    "fit_ls",
    "fit_fb_sylvester",
    "fit_fb11",
    "fit_rls",
    "fit_rfb",
    "fit_backward_ls",
    "fit",
    "as_method",
]

# relative eigen-gap below which the rank-m boundary is reported as a tie
_TIE_RTOL = 1e-12


class Method(str, Enum):
    LS = "LS"
    FB_SYLVESTER = "FB_SYLVESTER"
    FB11 = "FB11"
    RLS = "RLS"
    RFB = "RFB"
    BLS = "BLS"


@dataclass
class Estimate:
    """A fitted transition matrix.

    ``spectral_radius`` is computed lazily so it never counts towards
    ``fit_seconds``.
    """

    F_hat: np.ndarray
    method: Method
    rank: int
    Q_hat: np.ndarray | None = None
    fit_seconds: float = 0.0
    warnings: list = field(default_factory=list)

    @property
    def n(self):
        return self.F_hat.shape[0]

    @cached_property
    def spectral_radius(self):
        return spectral_radius(self.F_hat)

    @property
    def stability_margin(self):
        return 1.0 - self.spectral_radius

    def is_stable(self):
        return self.spectral_radius < 1.0

    def to_dict(self):
        out = {
            "method": Method(self.method).value,
            "n": int(self.n),
            "rank": int(self.rank),
            "f_hat": self.F_hat.ravel(order="C").tolist(),
        }
        if self.Q_hat is not None:
            out["q_hat"] = self.Q_hat.ravel(order="C").tolist()
        out["spectral_radius"] = float(self.spectral_radius)
        out["fit_seconds"] = float(self.fit_seconds)
        out["warnings"] = list(self.warnings)
        return out

    @classmethod
    def from_dict(cls, d):
        n = int(d["n"])
        q = d.get("q_hat")
        return cls(
            F_hat=np.asarray(d["f_hat"], dtype=float).reshape(n, n),
            method=Method(d["method"]),
            rank=int(d["rank"]),
            Q_hat=None if q is None else np.asarray(q, dtype=float).reshape(n, n),
            fit_seconds=float(d.get("fit_seconds", 0.0)),
            warnings=list(d.get("warnings", [])),
        )


def _timed(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        est = func(*args, **kwargs)
        est.fit_seconds = time.perf_counter() - t0
        return est

    return wrapper


def _check_rank(m, n):
    if isinstance(m, bool) or int(m) != m:
        raise InvalidRank(f"rank must be an integer, got {m!r}")
    m = int(m)
    if not 1 <= m <= n:
        raise InvalidRank(f"rank must satisfy 1 <= m <= {n}, got {m}")
    return m


def _sym(M):
    return 0.5 * (M + M.T)


def _rank_projection(eig, m):
    """Top-``m`` eigenvectors plus warnings about a tie at the boundary."""
    warnings = []
    vals = eig.values
    if m < vals.size:
        scale = max(abs(vals[0]), np.finfo(float).tiny)
        if vals[m - 1] - vals[m] <= _TIE_RTOL * scale:
            warnings.append(
                f"eigenvalues {m} and {m + 1} tie ({vals[m - 1]:.17g}); "
                "membership of the rank-m subspace decided by ordering rule"
            )
    return eig.top(m), warnings


def _ls_matrix(S):
    # S10 S00^{-1} = (S00^{-1} S01)'
    return spd_solve(spd_factor(S.S00, "S00"), S.S01).T


def _fb11_matrix(S):
    fac = spd_factor(S.S00 + S.S11, "S00 + S11")
    return 2.0 * spd_solve(fac, S.S01).T


@_timed
def fit_ls(S):
    """Full-rank least squares ``S10 S00^{-1}``. Not guaranteed stable."""
    return Estimate(F_hat=_ls_matrix(S), method=Method.LS, rank=S.n)


@_timed
def fit_fb11(S):
    """Forwards-backwards estimate with weight ``S11``: ``2 S10 (S00 + S11)^{-1}``."""
    return Estimate(F_hat=_fb11_matrix(S), method=Method.FB11, rank=S.n)


@_timed
def fit_fb_sylvester(S, P):
    """Forwards-backwards minimizer of ``J(F; P)`` for an SPD weight ``P``.

    Solves ``F S00 P^{-1} + S11 P^{-1} F = 2 S10 P^{-1}``.
    """
    P = np.asarray(P, dtype=float)
    if P.shape != (S.n, S.n):
        raise InvalidInput(f"P must be {S.n}x{S.n}, got {P.shape}")
    spd_factor(S.S00, "S00")
    spd_factor(S.S11, "S11")
    fac = spd_factor(P, "P")

    def right_inv(X):  # X P^{-1} = (P^{-1} X')'
        return spd_solve(fac, X.T).T

    A = right_inv(S.S11)
    B = right_inv(S.S00)
    C = 2.0 * right_inv(S.S10)
    return Estimate(
        F_hat=solve_sylvester(A, B, C), method=Method.FB_SYLVESTER, rank=S.n
    )


@_timed
def fit_rls(S, m):
    """Reduced-rank least squares of rank ``m``.

    Projects ``F_LS`` onto the top ``m`` eigenvectors of
    ``S11^{-1/2} S10 S00^{-1} S01 S11^{-1/2}`` (in ``S11^{1/2}`` coordinates)
    and returns the matching noise covariance estimate in ``Q_hat``.
    """
    m = _check_rank(m, S.n)
    F_ls = _ls_matrix(S)
    half, inv_half = spd_sqrt_pair(S.S11, "S11")
    eig = sym_eig(_sym(inv_half @ (F_ls @ S.S01) @ inv_half))
    V, warnings = _rank_projection(eig, m)
    F_hat = half @ V @ (V.T @ (inv_half @ F_ls))
    inner = np.eye(S.n) - (V * eig.values[:m]) @ V.T
    Q_hat = _sym(half @ inner @ half)
    return Estimate(
        F_hat=F_hat, method=Method.RLS, rank=m, Q_hat=Q_hat, warnings=warnings
    )


@_timed
def fit_rfb(S, m):
    """Stable reduced-rank forwards-backwards estimate of rank ``m``.

    Projects ``F_11 = 2 S10 (S00 + S11)^{-1}`` onto the top ``m``
    eigenvectors of ``S11^{-1/2} F_11 S01 S11^{-1/2}`` (in ``S11^{1/2}``
    coordinates). The result minimizes ``J(F; S11)`` over rank-``m``
    matrices and has spectral radius below one.
    """
    m = _check_rank(m, S.n)
    F11 = _fb11_matrix(S)
    half, inv_half = spd_sqrt_pair(S.S11, "S11")
    eig = sym_eig(_sym(inv_half @ (F11 @ S.S01) @ inv_half))
    V, warnings = _rank_projection(eig, m)
    F_hat = half @ V @ (V.T @ (inv_half @ F11))
    return Estimate(F_hat=F_hat, method=Method.RFB, rank=m, warnings=warnings)


@_timed
def fit_backward_ls(S):
    """Backwards least squares ``S01 S11^{-1}`` with residual covariance in ``Q_hat``."""
    Fb = spd_solve(spd_factor(S.S11, "S11"), S.S10).T
    Q_hat = _sym(S.S00 - Fb @ S.S10)
    return Estimate(F_hat=Fb, method=Method.BLS, rank=S.n, Q_hat=Q_hat)


_ALIASES = {"fb": Method.FB11}


def as_method(method):
    """Normalize a method name (``"ls"``, ``"fb"``, ``"RFB"`` ...) to :class:`Method`."""
    if isinstance(method, Method):
        return method
    name = str(method).strip()
    if name.lower() in _ALIASES:
        return _ALIASES[name.lower()]
    try:
        return Method(name.upper())
    except ValueError:
        raise InvalidInput(f"unknown method {method!r}") from None


def fit(S, method, rank=None, P=None):
    """Dispatch to an estimator by method name.

    ``rank`` defaults to ``n`` for the reduced-rank methods; ``P`` is only
    used by ``FB_SYLVESTER`` (default ``S11``).
    """
    method = as_method(method)
    if method is Method.LS:
        return fit_ls(S)
    if method is Method.FB11:
        return fit_fb11(S)
    if method is Method.FB_SYLVESTER:
        return fit_fb_sylvester(S, S.S11 if P is None else P)
    if method is Method.BLS:
        return fit_backward_ls(S)
    m = S.n if rank is None else rank
    if method is Method.RLS:
        return fit_rls(S, m)
    return fit_rfb(S, m)
