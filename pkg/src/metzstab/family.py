"""Spectral-abscissa optimization over product families of Metzler matrices.

A product family fixes, for each row index, a finite menu of admissible rows;
members are assembled by picking one row from each menu independently. The
selective greedy method alternates leading-eigenvector computations with
row-wise inner-product optimization. Its fixed points are certified global
optima: for maximization when the eigenvector is strictly positive, for
minimization unconditionally.
"""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import TopologicalSorter

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import core
from .errors import CycleSuspicionError, PreconditionError

TIE_TOL = 1e-12


@dataclass(frozen=True)
class UncertaintySet:
    """Menu of admissible rows for one row index of the family."""

    row_index: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError(f"row set {self.row_index} must be a nonempty 2-D array")
        if not np.isfinite(rows).all():
            raise ValueError(f"row set {self.row_index} must have finite entries")
        if self.row_index < 0 or self.row_index >= rows.shape[1]:
            raise ValueError(f"row index {self.row_index} outside dimension {rows.shape[1]}")
        off = np.delete(rows, self.row_index, axis=1)
        if off.size and float(off.min()) < 0.0:
            raise PreconditionError(
                f"row set {self.row_index} has a negative off-diagonal entry")
        object.__setattr__(self, "rows", rows)

    @property
    def size(self) -> int:
        return self.rows.shape[0]


@dataclass(frozen=True)
class ProductFamily:
    sets: tuple[UncertaintySet, ...]

    def __post_init__(self):
        sets = tuple(self.sets)
        if not sets:
            raise ValueError("family needs at least one row set")
        d = sets[0].rows.shape[1]
        if len(sets) != d:
            raise ValueError(f"family has {len(sets)} row sets for dimension {d}")
        for pos, s in enumerate(sets):
            if s.row_index != pos:
                raise ValueError(f"row set at position {pos} claims index {s.row_index}")
            if s.rows.shape[1] != d:
                raise ValueError(f"row set {pos} has width {s.rows.shape[1]}, expected {d}")
        object.__setattr__(self, "sets", sets)

    @property
    def dim(self) -> int:
        return len(self.sets)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.sets)

    def matrix(self, choices) -> np.ndarray:
        if len(choices) != self.dim:
            raise ValueError(f"need {self.dim} choices, got {len(choices)}")
        return np.vstack([s.rows[c] for s, c in zip(self.sets, choices)])


@dataclass(frozen=True)
class GreedyOutcome:
    matrix: np.ndarray
    abscissa: float
    row_choices: tuple[int, ...]
    iterations: int
    eigenvector: np.ndarray
    reducibility_flag: bool
    abscissa_trace: tuple[float, ...] = ()
    choice_trace: tuple[tuple[int, ...], ...] = ()


@dataclass(frozen=True)
class FrobeniusSplit:
    """Strongly connected blocks of the union sparsity graph, topologically ordered."""

    blocks: tuple[tuple[int, ...], ...]
    subfamilies: tuple[ProductFamily, ...]


def row_optimize(rows: np.ndarray, v: np.ndarray, direction: str = "max",
                 incumbent: int | None = None, tol: float = TIE_TOL) -> int:
    """Index of the row optimizing <row, v>, keeping the incumbent on ties.

    Without an incumbent, ties resolve to the lowest index (numpy argmax /
    argmin first-occurrence behaviour).
    """
    scores = rows @ v
    if direction == "max":
        best = int(np.argmax(scores))
    elif direction == "min":
        best = int(np.argmin(scores))
    else:
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    if incumbent is not None:
        gap = abs(float(scores[incumbent]) - float(scores[best]))
        if gap <= tol * max(1.0, abs(float(scores[best]))):
            return incumbent
    return best


def selective_greedy(family: ProductFamily, direction: str = "max", *,
                     start_choices=None, tol: float = TIE_TOL,
                     max_iter: int = 200, eig_tol: float = core.DEFAULT_TOL,
                     eig_max_iter: int = core.DEFAULT_MAX_ITER) -> GreedyOutcome:
    """Selective greedy optimization of the spectral abscissa over a family.

    Each iteration computes the selected leading eigenpair of the current
    member, then re-optimizes every row against the eigenvector; rows only
    change on strict improvement, so a full sweep without changes is a fixed
    point and the loop stops. The final iteration (the no-change sweep) is
    included in ``iterations``.

    For ``direction="max"`` the outcome's ``reducibility_flag`` is set when
    the final eigenvector has (numerically) zero components, in which case
    the maximality certificate does not apply and the caller should use
    :func:`optimize_with_irreducibility_patch`. Minimization fixed points
    are certified global minima regardless of zeros.

    Raises
    ------
    CycleSuspicionError
        If ``max_iter`` sweeps pass without reaching a fixed point; the
        error carries the visited choice tuples.
    """
    if direction not in ("max", "min"):
        raise ValueError(f"direction must be 'max' or 'min', got {direction!r}")
    d = family.dim
    choices = list(start_choices) if start_choices is not None else [0] * d
    for pos, (c, s) in enumerate(zip(choices, family.sets)):
        if not 0 <= c < s.size:
            raise ValueError(f"start choice {c} out of range for row set {pos}")

    x = family.matrix(choices)
    abscissa_trace: list[float] = []
    choice_trace: list[tuple[int, ...]] = [tuple(choices)]
    pair = None
    for it in range(1, max_iter + 1):
        pair = core.selected_leading_eigenpair(x, tol=eig_tol, max_iter=eig_max_iter)
        abscissa_trace.append(pair.value)
        changed = False
        for i in range(d):
            j = row_optimize(family.sets[i].rows, pair.vector, direction,
                             incumbent=choices[i], tol=tol)
            if j != choices[i]:
                choices[i] = j
                changed = True
        if not changed:
            flag = direction == "max" and bool(
                core.support(pair.vector).size < d)
            return GreedyOutcome(
                matrix=x, abscissa=pair.value, row_choices=tuple(choices),
                iterations=it, eigenvector=pair.vector, reducibility_flag=flag,
                abscissa_trace=tuple(abscissa_trace),
                choice_trace=tuple(choice_trace))
        choice_trace.append(tuple(choices))
        x = family.matrix(choices)

    best = GreedyOutcome(
        matrix=x, abscissa=abscissa_trace[-1], row_choices=tuple(choices),
        iterations=max_iter, eigenvector=pair.vector, reducibility_flag=True,
        abscissa_trace=tuple(abscissa_trace), choice_trace=tuple(choice_trace))
    raise CycleSuspicionError(
        f"greedy row selection did not settle in {max_iter} sweeps",
        best=best, trace=choice_trace)


def union_adjacency(family: ProductFamily) -> np.ndarray:
    """Boolean off-diagonal adjacency of the union sparsity graph."""
    d = family.dim
    adj = np.zeros((d, d), dtype=bool)
    for i, s in enumerate(family.sets):
        nz = (np.abs(s.rows) > 0.0).any(axis=0)
        nz[i] = False
        adj[i] = nz
    return adj


def frobenius_blocks(family: ProductFamily) -> FrobeniusSplit:
    """Split a family along the SCCs of its union sparsity graph.

    Every member of the family is block-triangular with respect to the
    returned node order, so each member's spectrum is the union of the
    spectra of its diagonal blocks and the family optimum is assembled
    blockwise.
    """
    adj = union_adjacency(family)
    n_comp, labels = connected_components(csr_matrix(adj), directed=True,
                                          connection="strong")
    deps: dict[int, set[int]] = {c: set() for c in range(n_comp)}
    for i, j in zip(*np.nonzero(adj)):
        if labels[i] != labels[j]:
            deps[int(labels[j])].add(int(labels[i]))
    order = list(TopologicalSorter(deps).static_order())

    blocks = []
    subfamilies = []
    for comp in order:
        nodes = tuple(int(k) for k in np.flatnonzero(labels == comp))
        cols = np.array(nodes)
        sets = tuple(
            UncertaintySet(local, family.sets[node].rows[:, cols])
            for local, node in enumerate(nodes))
        blocks.append(nodes)
        subfamilies.append(ProductFamily(sets))
    return FrobeniusSplit(tuple(blocks), tuple(subfamilies))


def _augmented(family: ProductFamily, alpha: float, beta: float) -> ProductFamily:
    # Append the rows of H = alpha*P - beta*I (P the cyclic permutation), whose
    # directed cycle makes the union graph irreducible.
    d = family.dim
    sets = []
    for i, s in enumerate(family.sets):
        h = np.zeros(d)
        h[(i + 1) % d] += alpha
        h[i] -= beta
        sets.append(UncertaintySet(i, np.vstack([s.rows, h])))
    return ProductFamily(tuple(sets))


def optimize_with_irreducibility_patch(family: ProductFamily, direction: str = "max", *,
                                       alpha: float = 1.0, beta: float = 0.0,
                                       retries: int = 3,
                                       **greedy_kwargs) -> GreedyOutcome:
    """Maximize the abscissa with a certificate even on reducible families.

    Runs the greedy on the family augmented with the rows of H = alpha*P -
    beta*I. If the optimum uses no augmented row and its eigenvector is
    strictly positive, it is a certified maximum of the original family.
    Otherwise the patch is retried with halved weights, and finally the
    family is split into its Frobenius blocks and optimized blockwise (the
    block assembly is exact: the assembled member is block-triangular, so
    its abscissa is the maximum of the block optima).
    """
    if direction != "max":
        raise PreconditionError(
            "the irreducibility patch applies to maximization only; "
            "minimization fixed points are certified without it")
    plain = selective_greedy(family, "max", **greedy_kwargs)
    if not plain.reducibility_flag:
        return plain

    sizes = family.sizes
    a, b = float(alpha), float(beta)
    for _ in range(max(0, retries)):
        out = selective_greedy(_augmented(family, a, b), "max", **greedy_kwargs)
        used_patch = any(c >= m for c, m in zip(out.row_choices, sizes))
        if not used_patch and not out.reducibility_flag:
            return out
        a, b = a / 2.0, b / 2.0

    split = frobenius_blocks(family)
    if len(split.blocks) == 1:
        # Genuinely irreducible union graph; return the flagged greedy result.
        return plain

    d = family.dim
    choices = [0] * d
    iterations = 0
    block_abscissas = []
    for nodes, sub in zip(split.blocks, split.subfamilies):
        out = optimize_with_irreducibility_patch(
            sub, "max", alpha=alpha, beta=beta, retries=retries, **greedy_kwargs)
        iterations += out.iterations
        block_abscissas.append(out.abscissa)
        for local, node in enumerate(nodes):
            choices[node] = out.row_choices[local]
    x = family.matrix(choices)
    pair = core.selected_leading_eigenpair(x)
    return GreedyOutcome(
        matrix=x, abscissa=max(block_abscissas), row_choices=tuple(choices),
        iterations=iterations, eigenvector=pair.vector, reducibility_flag=True,
        abscissa_trace=(max(block_abscissas),), choice_trace=(tuple(choices),))
