import numpy as np
import pytest

from metzstab import core, gen
from metzstab.errors import PreconditionError
from metzstab.family import (
    FrobeniusSplit,
    ProductFamily,
    UncertaintySet,
    frobenius_blocks,
    optimize_with_irreducibility_patch,
    row_optimize,
    selective_greedy,
)

import oracles


def two_row_family():
    return ProductFamily((
        UncertaintySet(0, [[-1.0, 2.0], [-3.0, 1.0]]),
        UncertaintySet(1, [[1.0, -2.0], [0.5, 0.0]]),
    ))


def test_uncertainty_set_rejects_negative_offdiagonal():
    with pytest.raises(PreconditionError):
        UncertaintySet(0, [[0.0, -1.0]])
    # the diagonal position may be negative
    UncertaintySet(1, [[2.0, -7.0]])


def test_family_shape_validation():
    with pytest.raises(ValueError):
        ProductFamily((UncertaintySet(0, [[0.0, 1.0]]),))
    with pytest.raises(ValueError):
        ProductFamily((
            UncertaintySet(1, [[1.0, 0.0]]),
            UncertaintySet(0, [[0.0, 1.0]]),
        ))


def test_row_optimize_worked_example():
    rows = np.array([[1.0, 0.0], [0.0, 1.0]])
    v = np.array([2.0, 1.0])
    assert row_optimize(rows, v, "max") == 0
    assert row_optimize(rows, v, "min") == 1


def test_row_optimize_keeps_incumbent_on_tie():
    rows = np.array([[1.0, 0.0], [0.0, 1.0]])
    v = np.array([1.0, 1.0])
    assert row_optimize(rows, v, "max", incumbent=1) == 1
    assert row_optimize(rows, v, "max", incumbent=0) == 0
    # without an incumbent ties resolve to the first index
    assert row_optimize(rows, v, "max") == 0


def test_row_optimize_matches_linear_scan():
    rng = np.random.default_rng(5)
    for _ in range(100):
        rows = rng.uniform(-1.0, 1.0, (6, 4))
        v = rng.uniform(0.0, 1.0, 4)
        scores = rows @ v
        assert row_optimize(rows, v, "max") == int(np.argmax(scores))
        assert row_optimize(rows, v, "min") == int(np.argmin(scores))


def test_singleton_family_fixes_in_one_sweep():
    fam = ProductFamily((
        UncertaintySet(0, [[-2.0, 1.0]]),
        UncertaintySet(1, [[1.0, -2.0]]),
    ))
    out = selective_greedy(fam, "max")
    assert out.iterations == 1
    assert out.row_choices == (0, 0)
    assert out.abscissa == pytest.approx(-1.0, abs=1e-9)


def test_greedy_matches_exhaustive_scan_both_directions():
    rng = np.random.default_rng(17)
    for _ in range(15):
        fam = gen.generate_family(4, 3, kind="full", rng=rng)
        menus = [s.rows for s in fam.sets]
        got_max = optimize_with_irreducibility_patch(fam, "max")
        want_max, _ = oracles.family_vertex_optimum(menus, "max")
        assert got_max.abscissa == pytest.approx(want_max, abs=1e-8)
        got_min = selective_greedy(fam, "min")
        want_min, _ = oracles.family_vertex_optimum(menus, "min")
        assert got_min.abscissa == pytest.approx(want_min, abs=1e-8)


def test_greedy_trace_is_monotone_and_acyclic():
    rng = np.random.default_rng(29)
    for _ in range(10):
        fam = gen.generate_family(6, 4, kind="full", rng=rng)
        out = selective_greedy(fam, "max")
        trace = out.abscissa_trace
        assert all(b >= a - 1e-9 for a, b in zip(trace, trace[1:]))
        assert len(set(out.choice_trace)) == len(out.choice_trace)
        out = selective_greedy(fam, "min")
        trace = out.abscissa_trace
        assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_fixed_point_rows_are_scorewise_optimal():
    """At the greedy's fixed point with a positive eigenvector, every chosen
    row maximizes the inner product with that eigenvector over its menu."""
    rng = np.random.default_rng(43)
    fam = gen.generate_family(5, 4, kind="full", rng=rng)
    out = optimize_with_irreducibility_patch(fam, "max")
    assert out.eigenvector.min() > 0.0
    for i, s in enumerate(fam.sets):
        chosen = float(s.rows[out.row_choices[i]] @ out.eigenvector)
        best = float((s.rows @ out.eigenvector).max())
        assert chosen >= best - 1e-9 * max(1.0, abs(best))


def test_minimization_certificate_needs_no_patch():
    with pytest.raises(PreconditionError):
        optimize_with_irreducibility_patch(two_row_family(), "min")


def test_frobenius_blocks_single_component():
    fam = gen.generate_family(4, 2, kind="full", rng=np.random.default_rng(3))
    split = frobenius_blocks(fam)
    assert isinstance(split, FrobeniusSplit)
    assert split.blocks == ((0, 1, 2, 3),)


def test_frobenius_blocks_diagonal_family():
    fam = ProductFamily((
        UncertaintySet(0, [[-1.0, 0.0], [-2.0, 0.0]]),
        UncertaintySet(1, [[0.0, -3.0]]),
    ))
    split = frobenius_blocks(fam)
    assert len(split.blocks) == 2
    assert {b for block in split.blocks for b in block} == {0, 1}


def test_patch_resolves_block_diagonal_maximum():
    # Two decoupled 2x2 blocks; every member is reducible, so the plain
    # greedy cannot certify and the patch must still land on the true max.
    rows0 = [[-1.0, 1.0, 0.0, 0.0], [-0.5, 0.2, 0.0, 0.0]]
    rows1 = [[2.0, -1.0, 0.0, 0.0]]
    rows2 = [[0.0, 0.0, -3.0, 1.0], [0.0, 0.0, -4.0, 2.0]]
    rows3 = [[0.0, 0.0, 1.0, -2.0], [0.0, 0.0, 2.5, -2.0]]
    fam = ProductFamily((
        UncertaintySet(0, rows0),
        UncertaintySet(1, rows1),
        UncertaintySet(2, rows2),
        UncertaintySet(3, rows3),
    ))
    menus = [s.rows for s in fam.sets]
    want, _ = oracles.family_vertex_optimum(menus, "max")
    out = optimize_with_irreducibility_patch(fam, "max")
    assert out.abscissa == pytest.approx(want, abs=1e-8)
    assert core.spectral_abscissa(out.matrix) == pytest.approx(want, abs=1e-8)


def test_patch_leaves_irreducible_outcome_alone():
    rng = np.random.default_rng(59)
    fam = gen.generate_family(4, 3, kind="full", rng=rng)
    plain = selective_greedy(fam, "max")
    patched = optimize_with_irreducibility_patch(fam, "max")
    assert not plain.reducibility_flag
    assert patched.row_choices == plain.row_choices
