import numpy as np
import pytest

from chball.core import GroupElement, act, line_through
from chball.errors import DegenerateInputError, NotInGroupError, NotLoxodromicError
from chball.normal_forms import (
    block_residual_m,
    kak,
    loxodromic_normal_form,
    make_a,
    make_k,
    make_m,
    pair_mover,
    transvection,
    unitary_completion,
)
from chball.sampling import haar_unitary, random_element, random_k, random_loxodromic, random_sphere_points
from chball.spectral import lambda1, origin_norm_direct


def test_make_a_examples():
    assert np.allclose(make_a(0.0, 2).lift, np.eye(3))
    L = make_a(np.log(2), 2).lift
    assert L[0, 0] == pytest.approx(1.25) and L[0, 2] == pytest.approx(0.75)
    assert np.allclose(act(make_a(0.4, 2), np.zeros(2)), [np.tanh(0.4), 0])


def test_make_k_identity_and_errors():
    assert np.allclose(make_k(np.eye(2)).lift, np.eye(3))
    with pytest.raises(NotInGroupError):
        make_k(np.array([[2, 0], [0, 1]]))


def test_m_commutes_with_a(rng):
    k = make_m(haar_unitary(2, rng))
    a = make_a(0.9, 3)
    assert (k @ a).distance(a @ k) <= 1e-12


def test_unitary_completion(rng):
    u = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    u /= np.linalg.norm(u)
    Q = unitary_completion(u)
    assert np.allclose(Q[:, 0], u)
    assert np.allclose(Q.conj().T @ Q, np.eye(4), atol=1e-13)


def test_kak_examples(rng):
    k = random_k(2, rng)
    f = kak(k)
    assert f.t == 0.0 and f.compose().distance(k) <= 1e-12
    f = kak(make_a(1.3, 3))
    assert f.t == pytest.approx(1.3, abs=1e-12)


def test_kak_round_trip(rng):
    for m in (2, 3):
        for _ in range(50):
            s = rng.uniform(0, 3)
            g = random_k(m, rng) @ make_a(s, m) @ random_k(m, rng)
            f = kak(g)
            assert f.residual(g) <= 1e-10
            assert f.t == pytest.approx(s, abs=1e-10)
            assert f.t == pytest.approx(np.arctanh(origin_norm_direct(g)), abs=1e-12)


def test_transvection_moves_origin(rng):
    p = np.array([0.3 + 0.2j, -0.1j])
    assert np.allclose(act(transvection(p), np.zeros(2)), p)
    with pytest.raises(DegenerateInputError):
        transvection([1.0, 0])


def test_pair_mover(rng):
    x, y = random_sphere_points(3, 2, rng)
    h = pair_mover(x, y)
    assert np.allclose(act(h, np.array([1, 0, 0])), x, atol=1e-10)
    assert np.allclose(act(h, np.array([-1, 0, 0])), y, atol=1e-10)
    with pytest.raises(DegenerateInputError):
        pair_mover(x, x)


def test_normal_form_of_a_t():
    nf = loxodromic_normal_form(make_a(0.6, 2))
    assert nf.t == pytest.approx(0.6, abs=1e-12)
    assert nf.compose().distance(make_a(0.6, 2)) <= 1e-10


def test_normal_form_round_trip(rng):
    for _ in range(50):
        g, h0, k0, t = random_loxodromic(2, rng)
        nf = loxodromic_normal_form(g)
        assert nf.t == pytest.approx(t, abs=1e-9)
        assert nf.compose().distance(g) <= 1e-8
        assert block_residual_m(nf.k) <= 1e-9
        axis = line_through(act(nf.h, np.array([1, 0])), act(nf.h, np.array([-1, 0])))
        assert axis.isclose(line_through(act(h0, np.array([1, 0])), act(h0, np.array([-1, 0]))), 1e-9)
        assert np.exp(nf.t) == pytest.approx(lambda1(g), rel=1e-8)


def test_normal_form_rejects_non_loxodromic(rng):
    with pytest.raises(NotLoxodromicError):
        loxodromic_normal_form(random_k(2, rng))
    with pytest.raises(NotLoxodromicError):
        loxodromic_normal_form(GroupElement.identity(3))
