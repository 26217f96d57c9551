"""Error measures, stability classification and summary statistics.

Errors are kept as fractions; conversion to percentages happens only when
results are written out.
"""

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput, ZeroReference
from .linalg import eig_general, spectral_radius
from .moments import sample_moments
from .estimators import _ls_matrix

__all__ = [
    "SummaryStats",
    "Stability",
    "relative_estimation_error",
    "relative_prediction_error",
    "classify_stability",
    "pole_moduli",
    "summarize",
    "quantile7",
]


class Stability(NamedTuple):
    stable: bool
    margin: float


@dataclass(frozen=True)
class SummaryStats:
    median: float
    q25: float
    q75: float
    unstable_rate: float
    count: int

    def to_dict(self):
        return asdict(self)


def relative_estimation_error(F_hat, F_true):
    """``||F_hat - F|| / ||F||`` in the Frobenius norm."""
    F_true = np.asarray(F_true, dtype=float)
    ref = np.linalg.norm(F_true)
    if ref == 0.0:
        raise ZeroReference("reference matrix is zero")
    return float(np.linalg.norm(np.asarray(F_hat, dtype=float) - F_true) / ref)


def relative_prediction_error(F_hat, Y0, Y1, F_ls=None):
    """Excess one-step residual norm over full-rank least squares.

    ``(||Y1 - F_hat Y0|| - ||Y1 - F_LS Y0||) / ||Y1 - F_LS Y0||``. ``F_ls``
    may be passed to avoid refitting.
    """
    Y0 = np.asarray(Y0, dtype=float)
    Y1 = np.asarray(Y1, dtype=float)
    if F_ls is None:
        F_ls = _ls_matrix(sample_moments(Y0, Y1))
    base = np.linalg.norm(Y1 - F_ls @ Y0)
    if base <= 1e-14 * np.linalg.norm(Y1):
        raise ZeroReference("least-squares residual is zero to rounding")
    return float((np.linalg.norm(Y1 - np.asarray(F_hat) @ Y0) - base) / base)


def classify_stability(F_hat):
    rho = spectral_radius(F_hat)
    return Stability(stable=rho < 1.0, margin=1.0 - rho)


def pole_moduli(F_hat):
    """Moduli of all poles, descending."""
    return eig_general(F_hat).moduli


def quantile7(x, q):
    """Sample quantile with linear interpolation between order statistics."""
    return float(np.quantile(np.asarray(x, dtype=float), q, method="linear"))


def summarize(values, radii):
    """Median, quartiles and the fraction of radii ``>= 1``."""
    values = np.asarray(values, dtype=float).ravel()
    radii = np.asarray(radii, dtype=float).ravel()
    if values.size == 0:
        raise InvalidInput("cannot summarize an empty sample")
    if values.size != radii.size:
        raise InvalidInput(f"{values.size} values but {radii.size} radii")
    q25, med, q75 = np.quantile(values, [0.25, 0.5, 0.75], method="linear")
    return SummaryStats(
        median=float(med),
        q25=float(q25),
        q75=float(q75),
        unstable_rate=float(np.count_nonzero(radii >= 1.0) / radii.size),
        count=int(values.size),
    )
