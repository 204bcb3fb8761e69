import numpy as np
import pytest

from chball.core import act
from chball.dynamics import contraction_rate, iterate, verify_north_south
from chball.errors import NoEscapeError, NotLoxodromicError, PreconditionError
from chball.normal_forms import make_a
from chball.sampling import random_ball_points, random_element, random_k, random_loxodromic
from chball.spectral import fixed_points_loxodromic, lambda1, power_lift


def test_iterate_examples(rng):
    g = random_element(2, rng)
    z = random_ball_points(2, 1, rng)[0]
    assert np.allclose(iterate(g, z, 0), z)
    t = 0.35
    for n in (1, 5, 12):
        assert np.allclose(iterate(make_a(t, 2), np.zeros(2), n), [np.tanh(n * t), 0], atol=1e-14)


def test_iterate_semigroup(rng):
    for _ in range(10):
        g = random_element(2, rng, t_max=0.5)
        z = random_ball_points(2, 1, rng)[0]
        assert np.allclose(iterate(g, z, 10), iterate(g, iterate(g, z, 5), 5), atol=1e-9)


def test_power_lift_stays_normalized(rng):
    g = random_element(2, rng)
    for k in range(41):
        P, s = power_lift(g.lift, 2**k)
        assert np.linalg.norm(P) == pytest.approx(np.sqrt(3), rel=1e-12)
        assert np.isfinite(s)


def test_rates_on_and_off_axis():
    g = make_a(np.log(2), 2)
    on = contraction_rate(g, np.zeros(2))
    assert on.on_axis and on.slope == pytest.approx(-2 * np.log(2), rel=0.02)
    off = contraction_rate(g, np.array([0, 0.5]))
    assert not off.on_axis and off.slope == pytest.approx(-np.log(2), rel=0.02)


def test_rates_conjugated(rng):
    for _ in range(10):
        g, h, k, t = random_loxodromic(2, rng, t_range=(0.2, 1.5))
        w_on = np.array([rng.uniform(-0.8, 0.8), 0])
        w_off = random_ball_points(2, 1, rng, r_max=0.9)[0]
        for w in (w_on, w_off):
            est = contraction_rate(g, act(h, w))
            assert est.relative_error <= 0.02


def test_rates_preconditions(rng):
    with pytest.raises(NotLoxodromicError):
        contraction_rate(random_k(2, rng), np.zeros(2))
    g = make_a(0.5, 2)
    with pytest.raises(PreconditionError):
        contraction_rate(g, np.array([1.0, 0]))


def test_repeller_perturbation_still_converges(rng):
    g, *_ = random_loxodromic(2, rng)
    xp, xm = fixed_points_loxodromic(g)
    z = xm * (1 - 1e-6)
    assert np.linalg.norm(iterate(g, z, 200) - xp) < 1e-6


def test_north_south_standard():
    gs = [make_a(float(n), 2) for n in range(1, 21)]
    rng = np.random.default_rng(0)
    z = random_ball_points(2, 100, rng)
    rep = verify_north_south(gs, z)
    assert np.allclose(rep.attractor, [1, 0]) and np.allclose(rep.repeller, [-1, 0])
    assert rep.decreasing and rep.final <= 1e-6


def test_north_south_conjugated_and_exclusion(rng):
    g, h, *_ = random_loxodromic(2, rng, t_range=(1.0, 1.0))
    gs = [g.power(n) for n in range(1, 21)]
    y = act(h, np.array([-1.0, 0]))
    z = np.vstack([random_ball_points(2, 50, rng), y[None, :]])
    rep = verify_north_south(gs, z)
    assert np.allclose(rep.attractor, act(h, np.array([1.0, 0])), atol=1e-6)
    assert np.allclose(rep.repeller, y, atol=1e-6)
    assert rep.excluded >= 1
    assert rep.final <= 1e-6


def test_north_south_no_escape(rng):
    ks = [random_k(2, rng) for _ in range(5)]
    with pytest.raises(NoEscapeError):
        verify_north_south(ks, random_ball_points(2, 10, rng))
