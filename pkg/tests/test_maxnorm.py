import numpy as np
import pytest

from metzstab import core
from metzstab.errors import PreconditionError
from metzstab.maxnorm import clamp_shift, closest_stable_max, closest_unstable_max

import goldens
import helpers
import oracles


def test_destabilize_negative_identity():
    out = closest_unstable_max(-np.eye(2))
    assert out.tau_star == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(out.matrix, [[-0.5, 0.5], [0.5, -0.5]], atol=1e-12)
    assert oracles.abscissa(out.matrix) == pytest.approx(0.0, abs=1e-10)


def test_destabilize_scalar():
    out = closest_unstable_max([[-7.0]])
    assert out.tau_star == pytest.approx(7.0, abs=1e-12)
    assert out.matrix[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_destabilize_requires_stable_input():
    with pytest.raises(PreconditionError):
        closest_unstable_max(goldens.UNSTABLE_5)


def test_destabilized_matrix_sits_on_the_boundary():
    rng = np.random.default_rng(31)
    for _ in range(20):
        a = helpers.random_stable_metzler(rng, 4)
        out = closest_unstable_max(a)
        assert oracles.abscissa(out.matrix) == pytest.approx(0.0, abs=1e-8)
        assert core.matrix_norm(out.matrix - a, "max") == pytest.approx(
            out.tau_star, abs=1e-10)
        # strictly inside the ball everything stays stable
        shrunk = a + 0.99 * (out.matrix - a)
        assert oracles.abscissa(shrunk) < 0.0


def test_clamp_shift_worked_example():
    out = clamp_shift([[1.0, 2.0], [3.0, -1.0]], 2.0)
    np.testing.assert_array_equal(out, [[-1.0, 0.0], [1.0, -3.0]])
    np.testing.assert_array_equal(clamp_shift(goldens.SWAP_2, 0.0), goldens.SWAP_2)


def test_clamp_shift_monotone_in_tau():
    rng = np.random.default_rng(8)
    a = helpers.random_unstable_metzler(rng, 4)
    taus = np.linspace(0.0, float(a.max()) + 1.0, 12)
    etas = [oracles.abscissa(clamp_shift(a, t)) for t in taus]
    assert all(b <= a_ + 1e-10 for a_, b in zip(etas, etas[1:]))


def test_stabilize_diagonal_shortcut():
    # the largest entry lies on the diagonal, so tau equals it outright
    out = closest_stable_max(np.diag([2.0, -1.0]))
    assert out.tau_star == pytest.approx(2.0, abs=1e-12)
    np.testing.assert_allclose(out.matrix, np.diag([0.0, -3.0]), atol=1e-12)


def test_stabilize_symmetric_example():
    out = closest_stable_max(goldens.SWAP_2)
    assert out.tau_star == pytest.approx(goldens.SWAP_2_TAU, abs=1e-9)
    np.testing.assert_allclose(out.matrix, goldens.SWAP_2_STABILIZED, atol=1e-9)
    assert out.abscissa == pytest.approx(0.0, abs=1e-8)


def test_stabilize_requires_unstable_input():
    with pytest.raises(PreconditionError):
        closest_stable_max(goldens.STABLE_5)


def test_stabilize_handles_singular_breakpoint():
    # eta hits 0 exactly where the clamp family loses invertibility
    out = closest_stable_max(goldens.SINGULAR_BREAKPOINT_2)
    assert out.tau_star == pytest.approx(goldens.SINGULAR_BREAKPOINT_2_TAU, abs=1e-9)
    assert oracles.abscissa(out.matrix) == pytest.approx(0.0, abs=1e-8)


def test_stabilize_matches_bisection_oracle():
    rng = np.random.default_rng(37)
    for _ in range(25):
        a = helpers.random_unstable_metzler(rng, 5)
        out = closest_stable_max(a)
        want = oracles.clamp_tau_root(a)
        assert out.tau_star == pytest.approx(want, abs=1e-8)
        assert core.matrix_norm(out.matrix - a, "max") == pytest.approx(
            out.tau_star, abs=1e-10)


def test_stabilization_is_sharp():
    """Any smaller shift leaves the matrix unstable."""
    rng = np.random.default_rng(41)
    for _ in range(15):
        a = helpers.random_unstable_metzler(rng, 4)
        out = closest_stable_max(a)
        delta = 1e-4 * out.tau_star
        assert oracles.abscissa(clamp_shift(a, out.tau_star - delta)) > 0.0
        assert oracles.abscissa(out.matrix) <= 1e-8
