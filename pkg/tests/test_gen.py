import numpy as np
import pytest

from metzstab import core, gen

import oracles


def test_full_kind_shapes_and_signs():
    fam = gen.generate_family(5, 3, kind="full", seed=42)
    assert fam.dim == 5
    assert fam.sizes == (3, 3, 3, 3, 3)
    for i, s in enumerate(fam.sets):
        off = np.delete(s.rows, i, axis=1)
        assert off.min() >= 0.0
        assert s.rows[:, i].min() >= -1.0


def test_nonneg_kind_is_entrywise_nonnegative():
    fam = gen.generate_family(4, 2, kind="nonneg", seed=1)
    for s in fam.sets:
        assert s.rows.min() >= 0.0


def test_seeded_generation_is_deterministic():
    a = gen.generate_family(6, 4, kind="sparse", seed=7)
    b = gen.generate_family(6, 4, kind="sparse", seed=7)
    for s_a, s_b in zip(a.sets, b.sets):
        np.testing.assert_array_equal(s_a.rows, s_b.rows)
    c = gen.generate_family(6, 4, kind="sparse", seed=8)
    assert any(not np.array_equal(s_a.rows, s_c.rows)
               for s_a, s_c in zip(a.sets, c.sets))


def test_sparse_rows_respect_density_bounds():
    lo, hi = 0.09, 0.15
    rng = np.random.default_rng(12)
    for row_index in (0, 24):
        rows = gen.generate_uncertainty_rows(25, 40, row_index, kind="sparse",
                                             density=(lo, hi), rng=rng)
        nnz_cap = max(1, round(hi * 25))
        for r in rows:
            # diagonal always carries a value; off-diagonal fill tops out at
            # round(gamma * d) - 1
            structural = int(np.count_nonzero(np.delete(r, row_index))) + 1
            assert 1 <= structural <= nnz_cap


def test_sparse_density_bounds_at_scale():
    # one row menu at the documented experiment scale, streamed per set
    d, count = 600, 200
    lo, hi = 0.09, 0.15
    rng = np.random.default_rng(0)
    lo_cap = max(1, round(lo * d))
    hi_cap = max(1, round(hi * d))
    for row_index in range(0, d, 97):
        rows = gen.generate_uncertainty_rows(d, count, row_index, kind="sparse",
                                             density=(lo, hi), rng=rng)
        filled = (np.abs(np.delete(rows, row_index, axis=1)) > 0).sum(axis=1) + 1
        assert int(filled.min()) >= lo_cap - 1
        assert int(filled.max()) <= hi_cap


def test_density_validation():
    rng = np.random.default_rng(2)
    with pytest.raises(ValueError):
        gen.generate_uncertainty_rows(5, 2, 0, kind="sparse", density=(0.0, 0.5),
                                      rng=rng)
    with pytest.raises(ValueError):
        gen.generate_uncertainty_rows(5, 2, 0, kind="sparse", density=(0.6, 0.5),
                                      rng=rng)
    with pytest.raises(ValueError):
        gen.generate_uncertainty_rows(5, 2, 0, kind="cauchy", rng=rng)
    with pytest.raises(ValueError):
        gen.generate_uncertainty_rows(5, 2, 7, rng=rng)


def test_generate_metzler_stability_control():
    rng = np.random.default_rng(33)
    for _ in range(10):
        u = gen.generate_metzler(4, unstable=True, rng=rng)
        s = gen.generate_metzler(4, unstable=False, rng=rng)
        assert core.is_metzler(u) and core.is_metzler(s)
        assert oracles.abscissa(u) > 0.0
        assert oracles.abscissa(s) < 0.0
