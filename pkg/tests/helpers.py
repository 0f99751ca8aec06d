"""Random instance builders shared by the module tests and acceptance suites."""

import numpy as np

from metzstab import gen

import oracles


def random_metzler(rng: np.random.Generator, d: int, *, scale: float = 1.0) -> np.ndarray:
    a = rng.uniform(0.0, scale, size=(d, d))
    np.fill_diagonal(a, rng.uniform(-2.0 * scale, scale, size=d))
    return a


def random_stable_metzler(rng: np.random.Generator, d: int) -> np.ndarray:
    return gen.generate_metzler(d, unstable=False, rng=rng)


def random_unstable_metzler(rng: np.random.Generator, d: int) -> np.ndarray:
    return gen.generate_metzler(d, unstable=True, rng=rng)


def random_unstable_nonneg(rng: np.random.Generator, d: int, *,
                           level: float = 1.0) -> np.ndarray:
    """Entrywise positive matrix scaled so its spectral radius exceeds level."""
    a = rng.uniform(0.1, 1.0, size=(d, d))
    factor = rng.uniform(1.2, 3.0)
    return a * (level * factor / oracles.radius(a))


def random_sign_entries(rng: np.random.Generator, d: int, *,
                        density: float = 0.5) -> np.ndarray:
    """Random Metzler sign pattern as an int8 array."""
    e = (rng.random((d, d)) < density).astype(np.int8)
    e[np.arange(d), np.arange(d)] = rng.integers(-1, 2, size=d, dtype=np.int8)
    return e


def random_unstable_sign(rng: np.random.Generator, d: int, *,
                         density: float = 0.5) -> np.ndarray:
    while True:
        e = random_sign_entries(rng, d, density=density)
        if oracles.abscissa(e.astype(float)) > 0.05:
            return e
