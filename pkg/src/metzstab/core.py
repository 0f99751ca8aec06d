"""Core primitives: Metzler validation, norms, leading eigenpairs, stability tests.

Everything downstream leans on two facts about Metzler matrices: adding h*I
translates the spectrum (so the leading eigenvalue can always be exposed to a
power method by shifting into the nonnegative cone), and for nonnegative
matrices the spectral radius is attained at a real leading eigenvalue with a
nonnegative eigenvector.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp

from .errors import IterationLimitError, PreconditionError

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 20_000
STABILITY_TOL = 1e-9
SUPPORT_RTOL = 1e-9

# Above this dimension, low-density iterates go through scipy CSR matvecs.
_SPARSE_DIM = 128
_SPARSE_DENSITY = 0.25


class NormKind(str, Enum):
    MAX = "max"
    INF = "inf"
    ONE = "one"


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.array(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} must have finite entries")
    return arr


def offdiagonal_min(a: np.ndarray) -> float:
    d = a.shape[0]
    if d == 1:
        return 0.0
    mask = ~np.eye(d, dtype=bool)
    return float(a[mask].min())


def is_metzler(a) -> bool:
    return offdiagonal_min(as_square_matrix(a)) >= 0.0


def validate_metzler(a, name: str = "matrix") -> np.ndarray:
    arr = as_square_matrix(a, name)
    m = offdiagonal_min(arr)
    if m < 0.0:
        raise PreconditionError(f"{name} must be Metzler (off-diagonal >= 0), found {m}")
    return arr


def validate_nonnegative(a, name: str = "matrix") -> np.ndarray:
    arr = as_square_matrix(a, name)
    m = float(arr.min())
    if m < 0.0:
        raise PreconditionError(f"{name} must be entrywise nonnegative, found {m}")
    return arr


def metzlerize(a) -> np.ndarray:
    """Zero out negative off-diagonal entries, keeping the diagonal."""
    arr = as_square_matrix(a)
    out = np.maximum(arr, 0.0)
    np.fill_diagonal(out, np.diag(arr))
    return out


def matrix_norm(a, kind: NormKind | str = NormKind.INF) -> float:
    arr = as_square_matrix(a)
    kind = NormKind(kind)
    if kind is NormKind.MAX:
        return float(np.abs(arr).max())
    if kind is NormKind.INF:
        return float(np.abs(arr).sum(axis=1).max())
    return float(np.abs(arr).sum(axis=0).max())


def translation_shift(a) -> float:
    """Smallest h >= 0 such that A + h*I is entrywise nonnegative (A Metzler)."""
    arr = validate_metzler(a)
    return max(0.0, -float(np.diag(arr).min()))


@dataclass(frozen=True)
class EigenPair:
    """Leading eigenvalue with its selected nonnegative eigenvector.

    The vector is l1-normalized. ``residual`` is ||A v - value v||_inf,
    reported for the matrix the pair was computed from.
    """

    value: float
    vector: np.ndarray
    iterations: int
    residual: float


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    vector: np.ndarray
    iterations: int
    residual: float
    converged: bool
    sign_changes: int


@dataclass(frozen=True)
class DestabilizationResult:
    tau_star: float
    matrix: np.ndarray
    column: int | None = None


@dataclass(frozen=True)
class StabilizationResult:
    tau_star: float
    matrix: np.ndarray
    iterations: int
    abscissa: float
    trace: tuple = ()
    degenerate_perron: bool = False


def power_iteration(a, *, start=None, tol: float = DEFAULT_TOL,
                    max_iter: int = 100) -> PowerIterationResult:
    """Plain (unshifted) power method with a Rayleigh-quotient estimate.

    Works on arbitrary square matrices and never raises on stagnation: the
    result carries ``converged`` plus the number of sign-pattern changes
    observed along the iterates. Convergence means the vector sequence
    settles; a dominant negative eigenvalue makes the Rayleigh value settle
    while the normalized iterate keeps flipping sign, and that counts as
    non-convergence here (it is the failure mode the translation removes).
    """
    arr = as_square_matrix(a)
    d = arr.shape[0]
    x = np.ones(d) if start is None else np.array(start, dtype=float)
    nx = np.linalg.norm(x)
    if nx == 0.0:
        raise ValueError("start vector must be nonzero")
    x = x / nx

    lam = 0.0
    lam_prev = np.inf
    resid = np.inf
    sign_changes = 0
    pattern_prev = None
    it = 0
    for it in range(1, max_iter + 1):
        y = arr @ x
        lam = float(x @ y)  # Rayleigh quotient, x has unit 2-norm
        resid = float(np.abs(y - lam * x).max())
        scale = max(1.0, abs(lam))
        pattern = tuple(np.sign(np.where(np.abs(x) <= 1e-12, 0.0, x)).astype(int))
        settled = pattern_prev is not None and pattern == pattern_prev
        if not settled and pattern_prev is not None:
            sign_changes += 1
        pattern_prev = pattern
        if settled and resid <= tol * scale and abs(lam - lam_prev) <= tol * scale:
            return PowerIterationResult(lam, x, it, resid, True, sign_changes)
        lam_prev = lam
        ny = float(np.linalg.norm(y))
        if ny == 0.0:
            # Iterate collapsed (nilpotent direction); report as non-converged.
            return PowerIterationResult(lam, x, it, resid, False, sign_changes)
        x = y / ny
    return PowerIterationResult(lam, x, it, resid, False, sign_changes)


def selected_leading_eigenpair(a, *, tol: float = DEFAULT_TOL,
                               max_iter: int = DEFAULT_MAX_ITER) -> EigenPair:
    """Leading eigenvalue of a Metzler matrix with its selected eigenvector.

    Runs the power method on the translated matrix A + (h+1)I, which is
    nonnegative with positive diagonal, starting from the uniform vector.
    Starting strictly inside the cone makes the limit the "selected"
    eigenvector: the one reached when reducible zero patterns are broken by
    an infinitesimal positive perturbation.

    Parameters
    ----------
    a : array_like
        Metzler matrix.
    tol : float
        Convergence threshold: relative change of the eigenvalue estimate
        and absolute residual ||A v - value v||_inf must both fall below it.
    max_iter : int
        Iteration budget; exhaustion raises IterationLimitError carrying the
        best pair seen.

    Returns
    -------
    EigenPair
    """
    arr = validate_metzler(a)
    d = arr.shape[0]
    shift = translation_shift(arr) + 1.0
    shifted = arr + shift * np.eye(d)
    op = shifted
    if d >= _SPARSE_DIM and np.count_nonzero(shifted) < _SPARSE_DENSITY * d * d:
        op = sp.csr_matrix(shifted)

    x = np.full(d, 1.0 / d)
    lam = 0.0
    lam_prev = np.inf
    resid = np.inf
    for it in range(1, max_iter + 1):
        y = op @ x
        lam = float(y.sum())  # x sums to one, so this is the Rayleigh value
        resid = float(np.abs(y - lam * x).max())
        if resid <= tol and abs(lam - lam_prev) <= tol * max(1.0, abs(lam)):
            return EigenPair(lam - shift, x, it, resid)
        lam_prev = lam
        x = y / lam
    best = EigenPair(lam - shift, x, max_iter, resid)
    raise IterationLimitError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations "
        f"(residual {resid:.3e})", best=best)


def dense_leading_eigenpair(a, *, perturbation: float = 0.0) -> EigenPair:
    """Leading eigenpair via a dense eigendecomposition.

    Escape hatch for iterates where the power method stalls (near-defective
    leading pair). With ``perturbation`` > 0 the eigenvector is taken from
    A + eps*ones, approximating the selected vector on reducible matrices;
    the reported residual is measured against A itself, so it stays honest
    about the approximation.
    """
    arr = as_square_matrix(a)
    d = arr.shape[0]
    values = np.linalg.eigvals(arr)
    value = float(values.real.max())
    target = arr if perturbation == 0.0 else arr + perturbation
    vals, vecs = np.linalg.eig(target)
    v = vecs[:, int(np.argmax(vals.real))]
    v = v.real.copy()
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0.0, None)
    s = v.sum()
    v = np.full(d, 1.0 / d) if s == 0.0 else v / s
    resid = float(np.abs(arr @ v - value * v).max())
    return EigenPair(value, v, 0, resid)


# Dense fallback bound: above this, stalled power iterations propagate.
DENSE_FALLBACK_DIM = 64


def leading_eigenpair_with_fallback(a, *, tol: float = DEFAULT_TOL,
                                    max_iter: int = DEFAULT_MAX_ITER,
                                    dense_dim: int = DENSE_FALLBACK_DIM) -> EigenPair:
    """selected_leading_eigenpair with a dense-eig escape hatch.

    Iterates of the greedy stabilizers routinely pass through matrices whose
    leading eigenvalue is defective (nilpotent-like blocks after row cuts),
    where the power method converges like 1/k and exhausts any budget. For
    dimensions up to ``dense_dim`` such stalls fall back to the dense
    eigensolver with a tiny positive perturbation for the selected vector;
    beyond that the IterationLimitError propagates.
    """
    arr = validate_metzler(a)
    try:
        return selected_leading_eigenpair(arr, tol=tol, max_iter=max_iter)
    except IterationLimitError:
        if arr.shape[0] > dense_dim:
            raise
        eps = 1e-9 * max(1.0, float(np.abs(arr).max()))
        return dense_leading_eigenpair(arr, perturbation=eps)


def spectral_abscissa(a, *, tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Largest real part of the spectrum of a Metzler matrix."""
    return selected_leading_eigenpair(a, tol=tol, max_iter=max_iter).value


def spectral_radius(a, *, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> float:
    """Spectral radius of a nonnegative matrix (its leading eigenvalue)."""
    arr = validate_nonnegative(a)
    return selected_leading_eigenpair(arr, tol=tol, max_iter=max_iter).value


def _inverse_or_none(a: np.ndarray) -> np.ndarray | None:
    try:
        inv = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(inv).all():
        return None
    return inv


def is_hurwitz_stable(a, *, strict: bool = True, tol: float = STABILITY_TOL) -> bool:
    """Hurwitz stability test for Metzler matrices.

    Strict mode uses the inverse-positivity certificate: A is Hurwitz iff it
    is invertible with -A^{-1} entrywise nonnegative. Weak mode checks
    eta(A) <= tol instead.
    """
    arr = validate_metzler(a)
    if not strict:
        return spectral_abscissa(arr) <= tol
    inv = _inverse_or_none(arr)
    if inv is None:
        return False
    check = -inv
    return float(check.min()) >= -tol * max(1.0, float(np.abs(check).max()))


def is_schur_stable(a, *, strict: bool = True, tol: float = STABILITY_TOL,
                    level: float = 1.0) -> bool:
    """Schur stability test for nonnegative matrices: rho(A) < level.

    Strict mode checks that level*I - A is invertible with nonnegative
    inverse; weak mode checks rho(A) <= level + tol.
    """
    arr = validate_nonnegative(a)
    if level <= 0.0:
        raise PreconditionError("level must be positive")
    if not strict:
        return spectral_radius(arr) <= level + tol
    inv = _inverse_or_none(level * np.eye(arr.shape[0]) - arr)
    if inv is None:
        return False
    return float(inv.min()) >= -tol * max(1.0, float(np.abs(inv).max()))


def support(v: np.ndarray, *, rtol: float = SUPPORT_RTOL) -> np.ndarray:
    """Indices where the nonnegative vector v is meaningfully positive."""
    vmax = float(v.max(initial=0.0))
    if vmax <= 0.0:
        return np.empty(0, dtype=int)
    return np.flatnonzero(v > rtol * vmax)
