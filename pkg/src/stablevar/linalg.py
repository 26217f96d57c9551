"""Dense linear algebra used by the estimators.

Symmetric eigendecomposition with a deterministic ordering and sign rule,
SPD square roots and factorizations, spectral radius and pole sets, and
solvers for the discrete Lyapunov and Sylvester equations.

All functions are pure and take array_like inputs.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import InvalidInput, NotPositiveDefinite, SingularSystem, UnstableMatrix

__all__ = [
    "SPD_FLOOR",
    "SymEig",
    "PoleSet",
    "sym_eig",
    "spd_sqrt",
    "spd_inv_sqrt",
    "spd_sqrt_pair",
    "spd_factor",
    "spd_solve",
    "cholesky",
    "spectral_radius",
    "eig_general",
    "solve_dlyap",
    "solve_sylvester",
]

#: Relative eigenvalue floor below which a matrix is not treated as SPD.
SPD_FLOOR = 1e-12

_SYM_TOL = 1e-8
_KRON_SYLVESTER_MAX_N = 16
_KRON_DLYAP_MAX_N = 32


def _as_square(A, name="matrix"):
    A = np.asarray(A, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidInput(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput(f"{name} has non-finite entries")
    return A


def _symmetrize(S, name):
    S = _as_square(S, name)
    scale = max(1.0, float(np.max(np.abs(S), initial=0.0)))
    if np.max(np.abs(S - S.T), initial=0.0) > _SYM_TOL * scale:
        raise InvalidInput(f"{name} is not symmetric")
    return 0.5 * (S + S.T)


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix.

    ``values`` are sorted in descending order and ``vectors[:, k]`` pairs
    with ``values[k]``. In each eigenvector the entry of largest absolute
    value is positive.
    """

    values: np.ndarray
    vectors: np.ndarray

    def top(self, m):
        """Return the ``m`` leading eigenvectors as an ``n x m`` matrix."""
        return self.vectors[:, :m]

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


@dataclass(frozen=True)
class PoleSet:
    """Eigenvalues of a real square matrix.

    Sorted by descending modulus, then descending real part, then
    descending imaginary part, so conjugate pairs sit next to each other
    with the upper-half-plane member first.
    """

    poles: np.ndarray

    @property
    def moduli(self):
        return np.abs(self.poles)

    @property
    def spectral_radius(self):
        return float(self.moduli[0]) if self.poles.size else 0.0

    def __len__(self):
        return self.poles.size


def sym_eig(S):
    """Deterministic symmetric eigendecomposition.

    Parameters
    ----------
    S : array_like, shape (n, n)
        Symmetric matrix. Asymmetry above ``1e-8`` (relative to the
        largest entry) is rejected; smaller asymmetry is averaged out.

    Returns
    -------
    SymEig
        Eigenvalues in descending order with sign-normalized eigenvectors.
        Exactly tied eigenvalues are ordered by the lexicographic order of
        their (sign-normalized) eigenvectors.
    """
    S = _symmetrize(S, "S")
    w, V = np.linalg.eigh(S)
    n = w.size
    if n:
        idx = np.argmax(np.abs(V), axis=0)
        signs = np.sign(V[idx, np.arange(n)])
        signs[signs == 0] = 1.0
        V = V * signs
        # np.lexsort: last key is primary
        order = np.lexsort(tuple(V[::-1, :]) + (-w,))
        w = w[order]
        V = V[:, order]
    return SymEig(values=np.ascontiguousarray(w), vectors=np.ascontiguousarray(V))


def _check_floor(values, name):
    lmax = values[0] if values.size else 0.0
    lmin = values[-1] if values.size else 0.0
    if lmax <= 0.0 or lmin <= SPD_FLOOR * lmax:
        raise NotPositiveDefinite(
            f"{name} is not positive definite (smallest eigenvalue {lmin:.3e}, "
            f"largest {lmax:.3e})",
            eigenvalue=lmin,
        )


def spd_sqrt_pair(S, name="S"):
    """Return ``(S^{1/2}, S^{-1/2})`` from a single eigendecomposition."""
    eig = sym_eig(S)
    _check_floor(eig.values, name)
    V = eig.vectors
    r = np.sqrt(eig.values)
    half = (V * r) @ V.T
    inv_half = (V / r) @ V.T
    return 0.5 * (half + half.T), 0.5 * (inv_half + inv_half.T)


def spd_sqrt(S):
    """Symmetric square root of an SPD matrix."""
    return spd_sqrt_pair(S)[0]


def spd_inv_sqrt(S):
    """Inverse of the symmetric square root of an SPD matrix."""
    return spd_sqrt_pair(S)[1]


def spd_factor(S, name="S"):
    """Cholesky factor of an SPD matrix for use with :func:`spd_solve`.

    The eigenvalue floor is enforced via the LAPACK condition estimate;
    the (more expensive) exact eigenvalues are only computed when the
    estimate says the matrix is close to singular.

    Raises
    ------
    NotPositiveDefinite
        If the smallest eigenvalue is below ``SPD_FLOOR`` times the largest.
    """
    S = _symmetrize(S, name)
    try:
        factor = sla.cho_factor(S, lower=True, check_finite=False)
    except np.linalg.LinAlgError:
        _check_floor(np.linalg.eigvalsh(S)[::-1], name)
        raise  # pragma: no cover - eigvalsh disagrees with potrf
    anorm = float(np.max(np.sum(np.abs(S), axis=0), initial=0.0))
    rcond, info = lapack.dpocon(factor[0], anorm, uplo="L")
    if info != 0 or rcond < SPD_FLOOR:
        _check_floor(np.linalg.eigvalsh(S)[::-1], name)
    return factor


def spd_solve(factor, B):
    """Solve ``S X = B`` given ``factor = spd_factor(S)``."""
    return sla.cho_solve(factor, B, check_finite=False)


def cholesky(S):
    """Lower-triangular ``L`` with ``L @ L.T == S`` for SPD ``S``."""
    S = _symmetrize(S, "S")
    _check_floor(np.linalg.eigvalsh(S)[::-1], "S")
    return np.linalg.cholesky(S)


def eig_general(A):
    """Eigenvalues of a real square matrix as a sorted :class:`PoleSet`."""
    A = _as_square(A, "A")
    lam = np.linalg.eigvals(A) if A.size else np.empty(0, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    # conjugates are computed as exact mirror images by LAPACK
    order = np.lexsort((-lam.imag, -lam.real, -np.abs(lam)))
    return PoleSet(poles=lam[order])


def spectral_radius(A):
    """Largest eigenvalue modulus of ``A``."""
    A = _as_square(A, "A")
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def _dlyap_kron(F, Q):
    n = F.shape[0]
    M = np.eye(n * n) - np.kron(F, F)
    return np.linalg.solve(M, Q.reshape(-1)).reshape(n, n)


def _dlyap_doubling(F, Q, max_iter=64):
    X = Q.copy()
    A = F.copy()
    for _ in range(max_iter):
        step = A @ X @ A.T
        X = X + step
        if np.linalg.norm(step) <= 1e-17 * np.linalg.norm(X):
            break
        A = A @ A
    return X


def solve_dlyap(F, Q, method="auto"):
    """Solve the discrete Lyapunov equation ``P = F P F' + Q``.

    Parameters
    ----------
    F : array_like, shape (n, n)
        Stable transition matrix (spectral radius < 1).
    Q : array_like, shape (n, n)
        Symmetric positive definite.
    method : {"auto", "kron", "doubling"}
        ``kron`` solves the vectorized system ``(I - F kron F) vec P = vec Q``;
        ``doubling`` sums the series ``sum_k F^k Q F'^k`` by squaring.
        ``auto`` uses ``kron`` for ``n <= 32``.

    Raises
    ------
    UnstableMatrix
        If ``spectral_radius(F) >= 1``.
    """
    F = _as_square(F, "F")
    Q = _symmetrize(Q, "Q")
    if F.shape != Q.shape:
        raise InvalidInput(f"F {F.shape} and Q {Q.shape} differ in shape")
    rho = spectral_radius(F)
    if rho >= 1.0:
        raise UnstableMatrix(f"spectral radius {rho:.6g} >= 1", spectral_radius=rho)
    if method == "auto":
        method = "kron" if F.shape[0] <= _KRON_DLYAP_MAX_N else "doubling"
    if method == "kron":
        P = _dlyap_kron(F, Q)
    elif method == "doubling":
        P = _dlyap_doubling(F, Q)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    return 0.5 * (P + P.T)


def solve_sylvester(A, B, C, method="auto"):
    """Solve ``A X + X B = C``.

    ``kron`` solves ``(A kron I + I kron B') vec X = vec C`` directly;
    ``schur`` uses Bartels-Stewart. ``auto`` picks ``kron`` for small n.

    Raises
    ------
    SingularSystem
        If ``A`` and ``-B`` share an eigenvalue (to working precision), or
        the solution fails the residual check.
    """
    A = _as_square(A, "A")
    B = _as_square(B, "B")
    C = np.asarray(C, dtype=float)
    n, k = A.shape[0], B.shape[0]
    if C.shape != (n, k):
        raise InvalidInput(f"C must have shape {(n, k)}, got {C.shape}")
    if not np.all(np.isfinite(C)):
        raise InvalidInput("C has non-finite entries")

    scale = np.linalg.norm(A, 2) + np.linalg.norm(B, 2)
    if n and k:
        gap = np.min(np.abs(np.linalg.eigvals(A)[:, None] + np.linalg.eigvals(B)[None, :]))
        if gap <= 1e-13 * max(scale, np.finfo(float).tiny):
            raise SingularSystem("spectra of A and -B intersect")

    if method == "auto":
        method = "kron" if max(n, k) <= _KRON_SYLVESTER_MAX_N else "schur"
    if method == "kron":
        M = np.kron(A, np.eye(k)) + np.kron(np.eye(n), B.T)
        try:
            X = np.linalg.solve(M, C.reshape(-1)).reshape(n, k)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
    elif method == "schur":
        X = sla.solve_sylvester(A, B, C)
    else:
        raise InvalidInput(f"unknown method {method!r}")

    resid = np.linalg.norm(A @ X + X @ B - C)
    if not np.isfinite(resid) or resid > 1e-9 * scale * max(np.linalg.norm(X), 1e-300):
        if not (resid <= 1e-12 * max(np.linalg.norm(C), 1e-300)):
            raise SingularSystem(f"Sylvester residual {resid:.3e} too large")
    return X
