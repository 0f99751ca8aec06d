"""Closest unstable / stable matrices in the l-infinity norm (max row l1 mass).

Destabilization has a closed form: for Hurwitz-stable Metzler A the nearest
boundary matrix adds tau* = 1 / max_k(-A^{-1} e)_k to one column; the Schur
version at level h uses (h I - A)^{-1} e instead.

Stabilization minimizes the abscissa (or radius) over the row-wise l1 ball
B_tau(A) by a selective greedy sweep whose row minimizers have a closed form:
sort the support of the leading eigenvector by weight, zero entries in that
order until the budget runs out. Each sweep yields a decomposition
X = C - tau*R (R marks the pivot column per row), and when the ball minimum
goes strictly stable the exact boundary budget along the frozen (C, R) pair
follows from one Perron computation, which gives the outer loop its
superlinear jumps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import core
from .errors import IterationLimitError, PreconditionError

ZERO_TOL = 1e-8
DENSE_FALLBACK_DIM = 64
_SWEEP_TOL = 1e-10
_FP_RTOL = 1e-12
_NEG_GUARD = 1e-7


@dataclass(frozen=True)
class CRDecomposition:
    """Sweep decomposition: C collects cumulative masses, R marks pivots.

    ``C - tau*R`` equals the sweep's output matrix exactly in the Hurwitz
    regime; in the Schur regime the output clamps that formal matrix at zero
    (rows whose whole support mass fits in the budget).
    """

    c: np.ndarray
    r: np.ndarray
    tau: float

    def matrix(self) -> np.ndarray:
        return self.c - self.tau * self.r


@dataclass(frozen=True)
class _BallMinimum:
    status: str  # "stable" | "boundary" | "infeasible"
    matrix: np.ndarray
    objective: float
    cr: CRDecomposition | None
    sweeps: int


def closest_unstable_inf_hurwitz(a) -> core.DestabilizationResult:
    """Closest matrix with eta >= 0 in the l-inf norm, for Hurwitz-stable Metzler A.

    The optimum bumps a single column k (the argmax of -A^{-1} e) by
    tau* = 1 / (-A^{-1} e)_k; eta of the result is exactly 0.
    """
    arr = core.validate_metzler(a)
    if not core.is_hurwitz_stable(arr):
        raise PreconditionError("matrix must be strictly Hurwitz stable")
    y = np.linalg.solve(arr, -np.ones(arr.shape[0]))
    k = int(np.argmax(y))
    if y[k] <= 0.0:
        raise PreconditionError("inverse-positivity certificate failed")
    tau = 1.0 / float(y[k])
    x = arr.copy()
    x[:, k] += tau
    return core.DestabilizationResult(tau_star=tau, matrix=x, column=k)


def closest_unstable_inf_schur(a, *, level: float = 1.0) -> core.DestabilizationResult:
    """Closest matrix with rho >= level in the l-inf norm, for nonnegative A.

    Requires rho(A) < level; bumps column k = argmax((level*I - A)^{-1} e)
    by the reciprocal of that component, landing exactly on rho = level.
    """
    arr = core.validate_nonnegative(a)
    if level <= 0.0:
        raise PreconditionError("level must be positive")
    if not core.is_schur_stable(arr, level=level):
        raise PreconditionError(f"matrix must satisfy rho(A) < {level}")
    d = arr.shape[0]
    y = np.linalg.solve(level * np.eye(d) - arr, np.ones(d))
    k = int(np.argmax(y))
    if y[k] <= 0.0:
        raise PreconditionError("resolvent-positivity certificate failed")
    tau = 1.0 / float(y[k])
    x = arr.copy()
    x[:, k] += tau
    return core.DestabilizationResult(tau_star=tau, matrix=x, column=k)


def _sorted_support(v: np.ndarray) -> np.ndarray:
    sup = np.flatnonzero(v > 0.0)
    order = np.lexsort((sup, -v[sup]))  # weight descending, column ascending
    return sup[order]


def _minimize_row(base_row: np.ndarray, i: int, cols: np.ndarray, tau: float,
                  schur: bool):
    """Closed-form row minimizer over the l1 ball slice; returns (x, c, pivot).

    ``cols`` is the eigenvector support sorted by weight. Entries are zeroed
    in that order; the cutoff is the first position where the cumulative mass
    exceeds tau or, in the Hurwitz regime, the diagonal's position, whichever
    comes first (the unbounded diagonal absorbs any leftover budget there).
    """
    vals = base_row[cols]
    cums = np.cumsum(vals)
    over = np.flatnonzero(cums > tau)
    cross = int(over[0]) if over.size else None
    if schur:
        li = cross if cross is not None else len(cols) - 1
    else:
        p = int(np.flatnonzero(cols == i)[0])
        li = p if cross is None else min(p, cross)
    x = base_row.copy()
    x[cols[:li]] = 0.0
    value = float(cums[li]) - tau
    x[cols[li]] = max(value, 0.0) if schur else value
    c = base_row.copy()
    c[cols[:li]] = 0.0
    c[cols[li]] = float(cums[li])
    return x, c, int(cols[li])


def ball_row_minimizer(row, v, tau: float, row_index: int, *,
                       schur: bool = False) -> np.ndarray:
    """Minimize <x, v> over the row slice of the l1 ball of radius tau.

    The slice keeps off-diagonal entries nonnegative; the diagonal entry is
    unconstrained in the Hurwitz regime (``schur=False``) and floored at zero
    in the Schur regime. Entries outside the support of v are left at their
    original values (changing them cannot lower the objective).
    """
    base = np.asarray(row, dtype=float).copy()
    w = np.asarray(v, dtype=float)
    if base.ndim != 1 or w.shape != base.shape:
        raise ValueError("row and v must be 1-D arrays of equal length")
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    if float(w.min()) < 0.0:
        raise ValueError("v must be entrywise nonnegative")
    cols = _sorted_support(w)
    if cols.size == 0:
        return base
    if not schur and w[row_index] <= 0.0:
        # No diagonal stop: zero support entries in weight order within budget.
        vals = base[cols]
        cums = np.cumsum(vals)
        over = np.flatnonzero(cums > tau)
        if over.size == 0:
            base[cols] = 0.0
            return base
        li = int(over[0])
        base[cols[:li]] = 0.0
        base[cols[li]] = float(cums[li]) - tau
        return base
    x, _, _ = _minimize_row(base, row_index, cols, tau, schur)
    return x


def _sweep(base: np.ndarray, x: np.ndarray, v: np.ndarray, tau: float,
           schur: bool):
    d = base.shape[0]
    cols = _sorted_support(v)
    x_next = x.copy()
    c = x.copy()
    r = np.zeros((d, d))
    for i in cols:
        xi, ci, pivot = _minimize_row(base[i], int(i), cols, tau, schur)
        x_next[int(i)] = xi
        c[int(i)] = ci
        r[int(i), pivot] = 1.0
    return x_next, CRDecomposition(c=c, r=r, tau=tau)


def _eigenpair_fallback(x: np.ndarray, tol: float, max_iter: int) -> core.EigenPair:
    return core.leading_eigenpair_with_fallback(x, tol=tol, max_iter=max_iter,
                                                dense_dim=DENSE_FALLBACK_DIM)


def _threshold(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    out[out <= core.SUPPORT_RTOL * float(out.max())] = 0.0
    return out


def _ball_minimum(base: np.ndarray, tau: float, schur: bool, level: float, *,
                  tol: float, zero_tol: float, max_sweeps: int,
                  eig_max_iter: int) -> _BallMinimum:
    """Greedy minimization of the leading eigenvalue over the ball B_tau(base).

    Returns as soon as an iterate goes strictly below ``level`` (confirmed at
    full tolerance), or when the sweep reaches a fixed point, which is the
    certified ball minimum.
    """
    x = base.copy()
    cr_last = None
    scale = max(1.0, float(np.abs(base).max()) + tau)
    for sweep in range(1, max_sweeps + 1):
        pair = _eigenpair_fallback(x, _SWEEP_TOL, eig_max_iter)
        obj = pair.value
        if cr_last is not None and obj < level - zero_tol:
            tight = _eigenpair_fallback(x, tol, eig_max_iter)
            if tight.value < level - zero_tol:
                return _BallMinimum("stable", x, tight.value, cr_last, sweep)
            obj, pair = tight.value, tight
        x_next, cr = _sweep(base, x, _threshold(pair.vector), tau, schur)
        if float(np.abs(x_next - x).max()) <= _FP_RTOL * scale:
            tight = _eigenpair_fallback(x, tol, eig_max_iter)
            if abs(tight.value - level) <= zero_tol:
                status = "boundary"
            elif tight.value > level:
                status = "infeasible"
            else:
                status = "stable"
            return _BallMinimum(status, x, tight.value, cr_last, sweep)
        x = x_next
        cr_last = cr
    raise IterationLimitError(
        f"ball greedy did not settle in {max_sweeps} sweeps at tau={tau}",
        best=x)


def _jump_candidate(cr: CRDecomposition, schur: bool, level: float) -> float | None:
    # Root of (leading eigenvalue of C - t*R) = level in t, valid while the
    # (C, R) structure is frozen; None signals the caller to bisect instead.
    xf = cr.matrix()
    d = xf.shape[0]
    try:
        if schur:
            m = np.linalg.solve(level * np.eye(d) - xf, cr.r)
        else:
            m = -np.linalg.solve(xf, cr.r)
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(m).all() or float(m.min()) < -_NEG_GUARD:
        return None
    m = np.maximum(m, 0.0)
    try:
        lam = _eigenpair_fallback(m, core.DEFAULT_TOL, core.DEFAULT_MAX_ITER).value
    except IterationLimitError:
        return None
    if lam <= 1e-14:
        return None
    return cr.tau - 1.0 / lam


def _closest_stable_ball(base: np.ndarray, schur: bool, level: float, *,
                         tol: float, zero_tol: float, max_outer: int,
                         max_sweeps: int, eig_max_iter: int) -> core.StabilizationResult:
    norm0 = core.matrix_norm(base, core.NormKind.INF)
    tau_lo = 0.0
    tau_hi = None
    tau = norm0 / 2.0 if norm0 > 0.0 else 1.0
    trace: list[tuple[float, float]] = []
    best: tuple[float, _BallMinimum] | None = None
    for outer in range(1, max_outer + 1):
        bm = _ball_minimum(base, tau, schur, level, tol=tol, zero_tol=zero_tol,
                           max_sweeps=max_sweeps, eig_max_iter=eig_max_iter)
        trace.append((tau, bm.objective))
        if bm.status == "boundary":
            return core.StabilizationResult(
                tau_star=tau, matrix=bm.matrix, iterations=outer,
                abscissa=bm.objective, trace=tuple(trace))
        if bm.status == "stable":
            tau_hi = tau
            if best is None or tau < best[0]:
                best = (tau, bm)
            cand = None
            if bm.cr is not None:
                cand = _jump_candidate(bm.cr, schur, level)
            eps = 1e-14 * max(1.0, tau)
            if cand is None or cand <= tau_lo + eps:
                cand = 0.5 * (tau_lo + tau_hi)
            tau = cand
        else:
            tau_lo = tau
            if tau_hi is None:
                # Feasibility is guaranteed by tau = ||A||_inf + 1 (each row
                # can absorb its whole l1 mass), so doubling terminates.
                tau = min(2.0 * tau if tau > 0.0 else 1.0, norm0 + 1.0)
            else:
                tau = 0.5 * (tau_lo + tau_hi)
        if tau_hi is not None and tau_hi - tau_lo <= 1e-12 * max(1.0, norm0):
            held = best[1]
            return core.StabilizationResult(
                tau_star=best[0], matrix=held.matrix, iterations=outer,
                abscissa=held.objective, trace=tuple(trace))
    raise IterationLimitError(
        f"tau search did not converge in {max_outer} outer iterations",
        best=None if best is None else core.StabilizationResult(
            tau_star=best[0], matrix=best[1].matrix, iterations=max_outer,
            abscissa=best[1].objective, trace=tuple(trace)))


def closest_stable_inf_hurwitz(a, *, tol: float = core.DEFAULT_TOL,
                               zero_tol: float = ZERO_TOL, max_outer: int = 200,
                               max_sweeps: int = 500,
                               eig_max_iter: int = core.DEFAULT_MAX_ITER
                               ) -> core.StabilizationResult:
    """Closest Hurwitz-stable Metzler matrix in the l-inf norm, for eta(A) > 0.

    Alternates ball-greedy minimization with exact boundary jumps on the
    frozen (C, R) structure, maintaining an (infeasible, feasible) bracket.
    Completion is accepted when the ball minimum satisfies |eta| <= zero_tol.
    """
    arr = core.validate_metzler(a)
    eta0 = core.spectral_abscissa(arr, tol=tol, max_iter=eig_max_iter)
    if eta0 <= zero_tol:
        raise PreconditionError(f"matrix is already stable or on the boundary (eta={eta0:.3e})")
    return _closest_stable_ball(arr, schur=False, level=0.0, tol=tol,
                                zero_tol=zero_tol, max_outer=max_outer,
                                max_sweeps=max_sweeps, eig_max_iter=eig_max_iter)


def closest_stable_inf_schur(a, *, allow_metzler: bool = False,
                             tol: float = core.DEFAULT_TOL,
                             zero_tol: float = ZERO_TOL, max_outer: int = 200,
                             max_sweeps: int = 500,
                             eig_max_iter: int = core.DEFAULT_MAX_ITER
                             ) -> core.StabilizationResult:
    """Closest matrix with rho <= 1 in the l-inf norm, for nonnegative A, rho(A) > 1.

    With ``allow_metzler=False`` the search stays inside the nonnegative
    matrices. With ``allow_metzler=True`` the constraint relaxes to Metzler
    matrices with spectral abscissa 1, which reduces exactly to Hurwitz
    stabilization of A - I (the result's leading eigenvalue is then 1).
    """
    arr = core.validate_nonnegative(a)
    rho0 = core.spectral_radius(arr, tol=tol, max_iter=eig_max_iter)
    if rho0 <= 1.0 + zero_tol:
        raise PreconditionError(f"matrix is already Schur stable or on the boundary (rho={rho0:.6g})")
    if allow_metzler:
        d = arr.shape[0]
        inner = closest_stable_inf_hurwitz(
            arr - np.eye(d), tol=tol, zero_tol=zero_tol, max_outer=max_outer,
            max_sweeps=max_sweeps, eig_max_iter=eig_max_iter)
        return core.StabilizationResult(
            tau_star=inner.tau_star, matrix=inner.matrix + np.eye(d),
            iterations=inner.iterations, abscissa=inner.abscissa + 1.0,
            trace=tuple((t, e + 1.0) for t, e in inner.trace),
            degenerate_perron=inner.degenerate_perron)
    return _closest_stable_ball(arr, schur=True, level=1.0, tol=tol,
                                zero_tol=zero_tol, max_outer=max_outer,
                                max_sweeps=max_sweeps, eig_max_iter=eig_max_iter)
