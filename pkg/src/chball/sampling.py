"""Random elements and points used by tests, the Zariski test and the CLI."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .core import GroupElement
from .normal_forms import make_a, make_k, make_m


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if n == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(n, random_state=rng)


def random_k(m: int, rng: np.random.Generator) -> GroupElement:
    return make_k(haar_unitary(m, rng))


def random_m(m: int, rng: np.random.Generator) -> GroupElement:
    return make_m(haar_unitary(m - 1, rng), m=m)


def random_element(m: int, rng: np.random.Generator, t_max: float = 2.0) -> GroupElement:
    """k1 a_t k2 with Haar k_i and t uniform on [0, t_max]."""
    return random_k(m, rng) @ make_a(rng.uniform(0, t_max), m) @ random_k(m, rng)


def random_loxodromic(
    m: int,
    rng: np.random.Generator,
    t_range: tuple[float, float] = (0.3, 1.5),
    spread: float = 1.0,
) -> tuple[GroupElement, GroupElement, GroupElement, float]:
    """A loxodromic h k a_t h^{-1}; returns (g, h, k, t).

    ``spread`` bounds the translation length of the conjugating element h.
    """
    t = rng.uniform(*t_range)
    h = random_element(m, rng, t_max=spread)
    k = random_m(m, rng)
    g = h @ k @ make_a(t, m) @ h.inverse()
    return g, h, k, t


def random_ball_points(m: int, n: int, rng: np.random.Generator, r_max: float = 1.0) -> np.ndarray:
    """n points uniformly distributed in the ball of radius r_max in C^m."""
    x = rng.standard_normal((n, 2 * m))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    r = r_max * rng.random(n) ** (1.0 / (2 * m))
    x *= r[:, None]
    return x[:, :m] + 1j * x[:, m:]


def random_sphere_points(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal((n, 2 * m))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[:, :m] + 1j * x[:, m:]
