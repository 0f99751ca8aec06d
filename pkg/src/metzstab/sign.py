"""Sign-stability of Metzler sign matrices and closest stable sign patterns.

A sign matrix has entries in {-, 0, +}. For a Metzler sign pattern, strong
sign-stability (every realization Hurwitz) is equivalent to: all diagonal
entries are - and the directed graph of + off-diagonal entries is acyclic.
Weak sign-stability asks eta(sgn(M)) <= 0, where sgn(M) is the +-1/0/-1
realization; both are decidable from the realization's abscissa because it
majorizes every normalized realization row-wise.

Distances between sign matrices use the l-inf metric on realizations, which
counts unit reductions per row. Over the radius-k ball the row optimizer is a
pick-k-best-gains greedy, and the abscissa-minimizing pattern is found by the
same eigenvector-guided sweep as the numeric modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter

import numpy as np

from . import core
from .errors import CycleSuspicionError, PreconditionError

_GAIN_TOL = 1e-15


@dataclass(frozen=True)
class SignMatrix:
    """Square matrix over {-1, 0, +1} stored as int8."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValueError(f"sign matrix must be square and nonempty, got {arr.shape}")
        if not np.isin(arr, (-1, 0, 1)).all():
            raise ValueError("sign matrix entries must be -1, 0 or +1")
        object.__setattr__(self, "entries", arr.astype(np.int8))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_metzler_pattern(self) -> bool:
        return core.offdiagonal_min(self.entries.astype(float)) >= 0.0

    def realize(self) -> np.ndarray:
        return self.entries.astype(float)


@dataclass(frozen=True)
class SignBallOutcome:
    sign_matrix: SignMatrix
    abscissa: float
    iterations: int
    eigenvector: np.ndarray
    abscissa_trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class ClosestSignOutcome:
    sign_matrix: SignMatrix
    k_star: int
    abscissa: float
    evaluated: tuple[tuple[int, float], ...] = ()
    fallback_used: bool = False


def sign_pattern(a, *, tol: float = 0.0) -> SignMatrix:
    """Entrywise sign of a numeric matrix, with |entry| <= tol treated as 0."""
    arr = core.as_square_matrix(a)
    out = np.sign(np.where(np.abs(arr) <= tol, 0.0, arr))
    return SignMatrix(out.astype(np.int8))


def _require_metzler_pattern(m: SignMatrix) -> SignMatrix:
    if not m.is_metzler_pattern():
        raise PreconditionError("sign matrix must have a Metzler pattern (no - off-diagonal)")
    return m


def is_sign_stable(m: SignMatrix, *, strict: bool = True,
                   tol: float = core.STABILITY_TOL,
                   cross_check: bool = False) -> bool:
    """Sign-stability test for a Metzler sign pattern.

    Strict mode decides strong sign-stability combinatorially: all diagonal
    entries - and the + off-diagonal graph acyclic. Weak mode checks
    eta(sgn(M)) <= tol. ``cross_check=True`` additionally verifies the
    combinatorial answer against the spectral one (eta < 0) and raises on
    disagreement; useful in tests, off by default.
    """
    _require_metzler_pattern(m)
    e = m.entries
    if not strict:
        return core.leading_eigenpair_with_fallback(m.realize()).value <= tol

    if int(np.diag(e).max()) >= 0:
        combinatorial = False
    else:
        d = m.dim
        graph = {i: set(np.flatnonzero(e[i] > 0)) - {i} for i in range(d)}
        try:
            list(TopologicalSorter(graph).static_order())
            combinatorial = True
        except CycleError:
            combinatorial = False
    if cross_check:
        spectral = core.leading_eigenpair_with_fallback(m.realize()).value < -tol
        if combinatorial != spectral:
            raise AssertionError(
                f"sign-stability routes disagree: graph={combinatorial} spectral={spectral}")
    return combinatorial


def _best_row(orig_row: np.ndarray, i: int, k: int, v: np.ndarray) -> np.ndarray:
    # Unit reductions: a + off-diagonal drops to 0 for one unit (gain v_j);
    # the diagonal steps down by one unit at a time (gain v_i each), two
    # steps available from +, one from 0. Gains are additive, so the best
    # row inside the radius-k slice takes the k largest positive gains.
    gains = []
    for j in np.flatnonzero(orig_row > 0):
        j = int(j)
        if j != i:
            gains.append((float(v[j]), j))
    steps = 1 + int(orig_row[i]) if orig_row[i] >= 0 else 0
    gains.extend([(float(v[i]), i)] * steps)
    gains.sort(key=lambda g: (-g[0], -g[1]))  # weight desc, column desc
    row = orig_row.copy()
    for gain, j in gains[:k]:
        if gain <= _GAIN_TOL:
            break
        row[j] -= 1
    return row


def sign_ball_minimize(m: SignMatrix, k: int, *, tol: float = 1e-12,
                       max_iter: int = 100,
                       eig_tol: float = core.DEFAULT_TOL,
                       eig_max_iter: int = core.DEFAULT_MAX_ITER) -> SignBallOutcome:
    """Minimize eta(sgn(X)) over sign matrices within l-inf distance k of M.

    Greedy sweeps guided by the selected leading eigenvector of the current
    realization; rows change only on strict score improvement, and a full
    no-change sweep certifies the minimum over the ball. Degenerate iterates
    can tie rows exactly, and eigensolver noise then flips them back and
    forth; revisiting a state proves such a plateau, and the best state seen
    is returned (states in the ball are finite, so this always terminates).
    """
    _require_metzler_pattern(m)
    if k < 0:
        raise PreconditionError(f"ball radius must be nonnegative, got {k}")
    d = m.dim
    x = m.entries.copy()
    orig = m.entries
    trace: list[float] = []
    seen: set[bytes] = set()
    best = None
    for it in range(1, max_iter + 1):
        pair = core.leading_eigenpair_with_fallback(x.astype(float), tol=eig_tol,
                                                    max_iter=eig_max_iter)
        trace.append(pair.value)
        if best is None or pair.value < best[1].value:
            best = (x.copy(), pair)
        key = x.tobytes()
        if key in seen:
            x, pair = best
            return SignBallOutcome(
                sign_matrix=SignMatrix(x), abscissa=pair.value, iterations=it,
                eigenvector=pair.vector, abscissa_trace=tuple(trace))
        seen.add(key)
        v = pair.vector
        changed = False
        if k > 0:
            for i in range(d):
                cand = _best_row(orig[i], i, k, v)
                gap = float((x[i] - cand).astype(float) @ v)
                if gap > tol:
                    x[i] = cand
                    changed = True
        if not changed:
            return SignBallOutcome(
                sign_matrix=SignMatrix(x), abscissa=pair.value, iterations=it,
                eigenvector=pair.vector, abscissa_trace=tuple(trace))
    raise CycleSuspicionError(
        f"sign ball greedy did not settle in {max_iter} sweeps", trace=trace)


def closest_stable_sign(m: SignMatrix, *, tol: float = core.STABILITY_TOL,
                        **ball_kwargs) -> ClosestSignOutcome:
    """Smallest k whose radius-k sign ball around M contains a weakly stable pattern.

    Integer bisection on k in [0, ||sgn(M)||_inf], seeded at the midpoint;
    the minimized eta is nonincreasing in k, which is asserted on the
    memoized evaluations with a linear upward scan as the fallback if
    numerics ever disagree.
    """
    _require_metzler_pattern(m)
    eta0 = core.leading_eigenpair_with_fallback(m.realize()).value
    if eta0 <= tol:
        return ClosestSignOutcome(sign_matrix=m, k_star=0, abscissa=eta0,
                                  evaluated=((0, eta0),))

    norm = int(core.matrix_norm(m.realize(), core.NormKind.INF))
    memo: dict[int, SignBallOutcome] = {}

    def at(k: int) -> SignBallOutcome:
        if k not in memo:
            memo[k] = sign_ball_minimize(m, k, **ball_kwargs)
        return memo[k]

    k_lo, k_hi = 0, norm
    first = True
    while k_hi - k_lo > 1:
        k = max(k_lo + 1, min(norm // 2, k_hi - 1)) if first else (k_lo + k_hi) // 2
        first = False
        if at(k).abscissa <= tol:
            k_hi = k
        else:
            k_lo = k

    fallback = False
    ks = sorted(memo)
    etas = [memo[k].abscissa for k in ks]
    monotone = all(e2 <= e1 + 1e-9 for e1, e2 in zip(etas, etas[1:]))
    if not monotone or at(k_hi).abscissa > tol:
        # Numerics disagree with the theory; rescan from below.
        fallback = True
        k_hi = norm
        for k in range(1, norm + 1):
            if at(k).abscissa <= tol:
                k_hi = k
                break

    out = at(k_hi)
    evaluated = tuple((k, memo[k].abscissa) for k in sorted(memo))
    return ClosestSignOutcome(sign_matrix=out.sign_matrix, k_star=k_hi,
                              abscissa=out.abscissa, evaluated=evaluated,
                              fallback_used=fallback)
