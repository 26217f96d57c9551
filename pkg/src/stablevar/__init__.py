"""Stable reduced-rank VAR(1) identification.

Closed-form forwards-backwards estimators whose fitted transition
matrices are guaranteed stable, alongside the usual (reduced-rank) least
squares estimators and a Monte-Carlo harness comparing them.
"""

from ._backend import DEFAULT_BACKEND, HAVE_EXTENSION
from .errors import (
    InvalidInput,
    InvalidRank,
    NotPositiveDefinite,
    ParseError,
    SingularSystem,
    StableVarError,
    UnstableMatrix,
    ZeroReference,
)
from .estimators import (
    Estimate,
    Method,
    fit,
    fit_backward_ls,
    fit_fb11,
    fit_fb_sylvester,
    fit_ls,
    fit_rfb,
    fit_rls,
)
from .linalg import (
    PoleSet,
    SymEig,
    cholesky,
    eig_general,
    solve_dlyap,
    solve_sylvester,
    spd_inv_sqrt,
    spd_sqrt,
    spectral_radius,
    sym_eig,
)
from .metrics import (
    SummaryStats,
    classify_stability,
    relative_estimation_error,
    relative_prediction_error,
    summarize,
)
from .moments import (
    SampleMoments,
    build_data_matrices,
    criterion_j,
    moments_from_trajectory,
    residual_backward,
    residual_forward,
    sample_moments,
)
from .process import (
    BackwardsModel,
    Trajectory,
    VarModel,
    backwards_model,
    simulate,
    stationary_covariance,
)

__version__ = "0.1.0"
