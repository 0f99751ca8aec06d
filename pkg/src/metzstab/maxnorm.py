"""Closest unstable / stable Metzler matrices in the max norm (largest entry).

Destabilization of a Hurwitz-stable A has the closed form tau* =
1 / sum(-A^{-1}), reached by the uniform perturbation A + tau*ones.
Stabilization of an unstable A searches over the clamp family
A(tau) = (A - tau*ones) clamped to keep off-diagonal entries nonnegative:
A(tau) is piecewise linear in tau with breakpoints at the distinct positive
entries of A, so between two adjacent breakpoints that bracket the stability
boundary the exact crossing follows from one Perron computation.
"""

from __future__ import annotations

import numpy as np

from . import core
from .errors import PreconditionError

ZERO_TOL = 1e-12


def clamp_shift(a, tau: float) -> np.ndarray:
    """Subtract tau from every entry, clamping off-diagonal entries at zero."""
    arr = core.validate_metzler(a)
    out = np.maximum(arr - tau, 0.0)
    np.fill_diagonal(out, np.diag(arr) - tau)
    return out


def closest_unstable_max(a) -> core.DestabilizationResult:
    """Closest matrix with eta >= 0 in the max norm, for Hurwitz-stable Metzler A.

    Returns tau* and X = A + tau* (added to every entry); eta(X) = 0.
    """
    arr = core.validate_metzler(a)
    if not core.is_hurwitz_stable(arr):
        raise PreconditionError("matrix must be strictly Hurwitz stable")
    inv = np.linalg.inv(arr)
    total = float(-inv.sum())  # equals the entrywise l1 mass of A^{-1}
    if total <= 0.0:
        raise PreconditionError("inverse-positivity certificate failed")
    tau = 1.0 / total
    return core.DestabilizationResult(tau_star=tau, matrix=arr + tau)


def closest_stable_max(a, *, tol: float = core.DEFAULT_TOL,
                       zero_tol: float = ZERO_TOL,
                       eig_max_iter: int = core.DEFAULT_MAX_ITER) -> core.StabilizationResult:
    """Closest Hurwitz-stable Metzler matrix in the max norm, for eta(A) > 0.

    Bisects the breakpoint grid {0} U {distinct positive entries of A} for
    the sign change of eta(A(tau)), then resolves the exact crossing inside
    the bracketing linear piece: with H = (A(tau1) - A(tau2)) / (tau2 - tau1),
    tau* = tau2 - 1 / rho(-A(tau2)^{-1} H). If the largest diagonal entry is
    also the largest entry overall, the boundary sits exactly there.
    """
    arr = core.validate_metzler(a)
    eta0 = core.spectral_abscissa(arr, tol=tol, max_iter=eig_max_iter)
    if eta0 <= zero_tol:
        raise PreconditionError(f"matrix is already stable or on the boundary (eta={eta0:.3e})")

    trace: list[tuple[float, float]] = [(0.0, eta0)]

    diag_max = float(np.diag(arr).max())
    entry_max = float(arr.max())
    if diag_max >= entry_max:
        # All off-diagonal mass clamps away by tau = diag_max, where A(tau)
        # is diagonal with largest entry 0; below it eta >= diag_max - tau > 0.
        tau = diag_max
        x = clamp_shift(arr, tau)
        eta = core.spectral_abscissa(x, tol=tol, max_iter=eig_max_iter)
        trace.append((tau, eta))
        return core.StabilizationResult(tau_star=tau, matrix=x, iterations=1,
                                        abscissa=eta, trace=tuple(trace))

    grid = np.unique(arr[arr > 0.0])
    grid = np.concatenate(([0.0], grid))
    # eta at the top breakpoint is -max positive entry < 0 (all off-diagonal
    # mass is clamped away there), so a sign change exists on the grid.
    lo, hi = 0, len(grid) - 1
    eval_count = 0

    def eta_at(tau: float) -> float:
        nonlocal eval_count
        eval_count += 1
        value = core.spectral_abscissa(clamp_shift(arr, tau), tol=tol,
                                       max_iter=eig_max_iter)
        trace.append((tau, value))
        return value

    eta_hi = eta_at(float(grid[hi]))
    if abs(eta_hi) <= zero_tol:
        x = clamp_shift(arr, float(grid[hi]))
        return core.StabilizationResult(tau_star=float(grid[hi]), matrix=x,
                                        iterations=eval_count, abscissa=eta_hi,
                                        trace=tuple(trace))
    while hi - lo > 1:
        mid = (lo + hi) // 2
        value = eta_at(float(grid[mid]))
        if abs(value) <= zero_tol:
            x = clamp_shift(arr, float(grid[mid]))
            return core.StabilizationResult(tau_star=float(grid[mid]), matrix=x,
                                            iterations=eval_count, abscissa=value,
                                            trace=tuple(trace))
        if value > 0.0:
            lo = mid
        else:
            hi = mid

    tau1, tau2 = float(grid[lo]), float(grid[hi])
    a2 = clamp_shift(arr, tau2)
    h = (clamp_shift(arr, tau1) - a2) / (tau2 - tau1)
    try:
        m = -np.linalg.solve(a2, h)
    except np.linalg.LinAlgError:
        # A(tau2) stable and singular forces eta(A(tau2)) = 0: the breakpoint
        # itself is the crossing (the power estimate just missed the exact-hit
        # window by rounding).
        eta2 = core.spectral_abscissa(a2, tol=tol, max_iter=eig_max_iter)
        return core.StabilizationResult(tau_star=tau2, matrix=a2,
                                        iterations=eval_count, abscissa=eta2,
                                        trace=tuple(trace))
    degenerate = bool((np.abs(m).sum(axis=1) <= zero_tol).any())
    m = np.maximum(m, 0.0)  # clip solver noise; m is nonnegative in theory
    rho = core.spectral_radius(m, tol=tol, max_iter=eig_max_iter)
    if rho <= 0.0:
        raise PreconditionError("degenerate bracket: rho(-A(tau2)^{-1} H) = 0")
    tau = tau2 - 1.0 / rho
    x = clamp_shift(arr, tau)
    eta = core.spectral_abscissa(x, tol=tol, max_iter=eig_max_iter)
    trace.append((tau, eta))
    return core.StabilizationResult(tau_star=tau, matrix=x, iterations=eval_count + 1,
                                    abscissa=eta, trace=tuple(trace),
                                    degenerate_perron=degenerate)
