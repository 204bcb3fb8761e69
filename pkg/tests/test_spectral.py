import numpy as np
import pytest

from chball.core import GroupElement, act, line_through
from chball.errors import NotLoxodromicError
from chball.normal_forms import make_a, make_k, make_m
from chball.sampling import haar_unitary, random_element, random_k, random_loxodromic
from chball.spectral import (
    Kind,
    classify,
    fixed_points_loxodromic,
    lambda1,
    norm_at_origin,
    origin_norm_direct,
    sigma1,
    spectral_radius_sequence,
)

from conftest import charpoly_lambda1, parabolic_element


def test_sigma1_examples(rng):
    assert sigma1(GroupElement.identity(2)) == pytest.approx(1.0)
    assert sigma1(make_a(np.log(2), 2)) == pytest.approx(2.0, rel=1e-14)
    for _ in range(20):
        g, h = random_element(2, rng), random_element(2, rng)
        assert sigma1(g @ h) <= sigma1(g) * sigma1(h) * (1 + 1e-10)
        assert sigma1(g) == pytest.approx(np.linalg.svd(g.lift, compute_uv=False)[0])


def test_lambda1_examples(rng):
    assert lambda1(random_k(3, rng)) == pytest.approx(1.0, abs=1e-12)
    k = make_m(haar_unitary(1, rng))
    assert lambda1(k @ make_a(0.7, 2)) == pytest.approx(np.exp(0.7), rel=1e-12)


def test_lambda1_matches_characteristic_polynomial(rng):
    for m in (2, 3):
        for _ in range(20):
            g, *_ = random_loxodromic(m, rng)
            assert lambda1(g) == pytest.approx(charpoly_lambda1(g.lift), abs=1e-9)


def test_lambda1_inverse_symmetry(rng):
    for _ in range(20):
        g, *_ = random_loxodromic(2, rng)
        assert abs(lambda1(g) - lambda1(g.inverse())) <= 1e-9


def test_spectral_radius_sequence_monotone(rng):
    for _ in range(20):
        g = random_element(2, rng)
        seq = spectral_radius_sequence(g, [1, 2, 4, 8, 16])
        assert np.all(np.diff(seq) <= 1e-8)
        assert seq[-1] >= lambda1(g) - 1e-8


def test_classify_identity_and_k(rng):
    d = classify(GroupElement.identity(2))
    assert d.kind == Kind.ELLIPTIC and np.allclose(d.interior_fixed, 0)
    g = random_element(2, rng)
    e = g @ random_k(2, rng) @ g.inverse()
    d = classify(e)
    assert d.kind == Kind.ELLIPTIC
    assert np.allclose(act(e, d.interior_fixed), d.interior_fixed, atol=1e-9)


def test_classify_a_t():
    d = classify(make_a(0.5, 3))
    assert d.kind == Kind.LOXODROMIC
    assert np.allclose(d.fixed_plus, [1, 0, 0]) and np.allclose(d.fixed_minus, [-1, 0, 0])
    assert d.axis.isclose(line_through([1, 0, 0], [-1, 0, 0]))
    assert d.sigma1 >= d.lambda1


def test_classify_parabolic():
    g = parabolic_element(2)
    d = classify(g)
    assert d.kind == Kind.PARABOLIC
    assert lambda1(g) == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(d.fixed_plus, [1, 0], atol=1e-6)
    assert np.allclose(act(g, d.fixed_plus), d.fixed_plus, atol=1e-6)


def test_fixed_points_conjugated(rng):
    for _ in range(20):
        g, h, k, t = random_loxodromic(2, rng)
        xp, xm = fixed_points_loxodromic(g)
        assert np.allclose(xp, act(h, np.array([1, 0])), atol=1e-9)
        assert np.allclose(xm, act(h, np.array([-1, 0])), atol=1e-9)
        assert np.linalg.norm(act(g, xp) - xp) <= 1e-9


def test_fixed_points_requires_loxodromic(rng):
    with pytest.raises(NotLoxodromicError):
        fixed_points_loxodromic(random_k(2, rng))


def test_conjugation_invariance(rng):
    for _ in range(20):
        g = random_element(2, rng)
        h = random_element(2, rng, t_max=1.0)
        c = h @ g @ h.inverse()
        assert abs(lambda1(c) - lambda1(g)) <= 1e-8
        assert classify(c).kind == classify(g).kind


def test_norm_at_origin(rng):
    assert norm_at_origin(GroupElement.identity(2)) == pytest.approx(0.0, abs=1e-15)
    assert norm_at_origin(make_a(np.log(2), 2)) == pytest.approx(0.6, abs=1e-14)
    for _ in range(50):
        g = random_element(3, rng)
        assert norm_at_origin(g) == pytest.approx(origin_norm_direct(g), abs=1e-10)


def test_boundary_rate_of_origin_orbit(rng):
    g, *_ = random_loxodromic(2, rng, t_range=(0.3, 0.6))
    ns = np.arange(10, 31)
    vals = []
    for n in ns:
        s2 = sigma1(g.power(int(n))) ** 2
        vals.append(np.log(2 / (s2 + 1)))  # 1 - ||g^n(0)|| = 2/(s^2+1)
    slope = np.polyfit(ns, vals, 1)[0]
    assert slope == pytest.approx(-2 * np.log(lambda1(g)), rel=0.02)
