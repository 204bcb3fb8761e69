import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chball.core import (
    AffineLine,
    GroupElement,
    HermitianForm,
    act,
    boundary_point,
    form_value,
    line_through,
    point_on_line,
)
from chball.errors import DegenerateInputError, DimensionError, NotInGroupError
from chball.normal_forms import make_a, make_k
from chball.sampling import haar_unitary, random_ball_points, random_element, random_sphere_points

from conftest import raw_act


def test_form_on_basis_vectors():
    H = HermitianForm(2)
    assert form_value([1, 0, 0], [1, 0, 0], H) == 1
    assert form_value([0, 0, 1], [0, 0, 1], H) == -1


def test_form_vanishes_on_boundary_lifts(rng):
    x = random_sphere_points(3, 50, rng)
    v = np.concatenate([x, np.ones((50, 1))], axis=1)
    assert np.max(np.abs(form_value(v, v))) < 1e-14


def test_form_dimension_mismatch():
    with pytest.raises(DimensionError):
        form_value([1, 0], [1, 0, 0])
    with pytest.raises(DimensionError):
        form_value([1, 0], [1, 0], HermitianForm(2))


def test_identity_action(rng):
    z = random_ball_points(2, 20, rng)
    assert np.allclose(act(GroupElement.identity(2), z), z)


def test_a_t_moves_origin_along_e1():
    t = 0.8
    assert np.allclose(act(make_a(t, 3), np.zeros(3)), [np.tanh(t), 0, 0], atol=1e-15)


def test_action_matches_block_formula(rng):
    for _ in range(20):
        g = random_element(2, rng)
        z = random_ball_points(2, 1, rng)[0]
        assert np.allclose(act(g, z), raw_act(g.lift, z), atol=1e-12)


def test_ball_and_sphere_invariance(rng):
    for _ in range(10):
        g = random_element(2, rng)
        z = random_ball_points(2, 1000, rng)
        assert np.all(np.linalg.norm(act(g, z), axis=1) < 1)
        x = random_sphere_points(2, 1000, rng)
        assert np.max(np.abs(np.linalg.norm(act(g, x), axis=1) - 1)) <= 1e-10


def test_lift_normalization_is_phase_and_scale_invariant(rng):
    g = random_element(3, rng)
    h = GroupElement(g.lift * 3.7 * np.exp(1.1j))
    assert np.allclose(g.lift, h.lift, atol=1e-12)
    assert g.d.imag == 0 and g.d.real > 0


def test_rejects_non_group_matrix(rng):
    with pytest.raises(NotInGroupError):
        GroupElement(rng.standard_normal((3, 3)))
    with pytest.raises(DimensionError):
        GroupElement(np.eye(3)[:2])


def test_inverse_and_composition(rng):
    g, h = random_element(2, rng), random_element(2, rng)
    assert (g @ g.inverse()).isclose(GroupElement.identity(2), 1e-12)
    z = random_ball_points(2, 5, rng)
    assert np.allclose(act(g @ h, z), act(g, act(h, z)), atol=1e-12)


def test_power_matches_repeated_product(rng):
    g = random_element(2, rng, t_max=0.5)
    p = GroupElement.identity(2)
    for _ in range(7):
        p = p @ g
    assert g.power(7).isclose(p, 1e-10)
    assert g.power(-3).isclose(g.inverse() @ g.inverse() @ g.inverse(), 1e-10)


def test_k_preserves_norm(rng):
    k = make_k(haar_unitary(3, rng))
    v = random_ball_points(3, 30, rng)
    assert np.allclose(np.linalg.norm(act(k, v), axis=1), np.linalg.norm(v, axis=1))


def test_boundary_point_renormalizes():
    x = boundary_point(np.array([1 + 1e-11, 0]))
    assert np.linalg.norm(x) == 1.0
    with pytest.raises(DegenerateInputError):
        boundary_point([0.5, 0])


def test_line_through_axis():
    L = line_through([1, 0], [-1, 0])
    assert np.allclose(L.base, 0) and np.allclose(L.direction, [1, 0])


def test_line_through_e1_e2():
    L = line_through([1, 0], [0, 1])
    assert np.allclose(L.base, [0.5, 0.5])
    d = L.direction
    assert np.isclose(abs(np.vdot(d, np.array([-1, 1]) / np.sqrt(2))), 1)


def test_line_contains_random_boundary_pair(rng):
    x, y = random_sphere_points(3, 2, rng)
    L = line_through(x, y)
    assert L.distance(x) <= 1e-12 and L.distance(y) <= 1e-12


def test_point_on_line_examples(rng):
    L = AffineLine(np.zeros(2), np.array([1, 0]))
    assert point_on_line(L, [0.3, 0])
    assert not point_on_line(L, [0, 0.5])
    a, b = rng.standard_normal(3) + 0j, rng.standard_normal(3) + 1j * rng.standard_normal(3)
    lam = complex(rng.standard_normal(), rng.standard_normal())
    assert point_on_line(AffineLine(a, b), a + lam * b, tol=1e-12)


def test_line_through_coincident_points():
    with pytest.raises(DegenerateInputError):
        line_through([1, 0], [1, 0])


def test_canonical_form_idempotent(rng):
    L = AffineLine(rng.standard_normal(3) + 1j * rng.standard_normal(3),
                   rng.standard_normal(3) + 1j * rng.standard_normal(3))
    C = L.canonical()
    assert np.array_equal(C.base, L.base) and np.array_equal(C.direction, L.direction)
    C2 = C.canonical()
    assert np.array_equal(C2.base, C.base) and np.array_equal(C2.direction, C.direction)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(-np.pi, np.pi), st.floats(0.0, 0.99))
def test_group_action_stays_in_ball(t, theta, r):
    g = make_k(np.diag([np.exp(1j * theta), 1])) @ make_a(t, 2)
    z = np.array([r * np.exp(1j * theta), 0])
    assert np.linalg.norm(act(g, z)) < 1
