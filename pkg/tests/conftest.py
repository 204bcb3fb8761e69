"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from chball.core import GroupElement
from chball.maps.rational import compose, trivial_embedding
from chball.maps.symmetry import SymmetryPair, block_extension
from chball.normal_forms import make_a, make_k
from chball.sampling import random_element, random_k


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def raw_act(lift, z):
    """(Az + b)/(c.z + d) straight from the matrix blocks."""
    L = np.asarray(lift)
    A, b, c, d = L[:-1, :-1], L[:-1, -1], L[-1, :-1], L[-1, -1]
    return (A @ z + b) / (c @ z + d)


def charpoly_lambda1(lift) -> float:
    """Largest root modulus of the expanded characteristic polynomial,
    for the lift scaled to |det| = 1."""
    L = np.asarray(lift, dtype=complex)
    n = L.shape[0]
    L = L / abs(np.linalg.det(L)) ** (1.0 / n)
    return float(np.max(np.abs(np.roots(np.poly(L)))))


def parabolic_element(m: int = 2, s: float = 0.7) -> GroupElement:
    """exp(sX) for the nilpotent X = n u^* J - u n^* J, n = e_1 + e_{m+1}
    null and u = e_2 spacelike; X^3 = 0 and the only fixed point is e_1."""
    n_ = m + 1
    J = np.diag([1.0] * m + [-1.0])
    nv = np.zeros(n_)
    nv[0] = nv[-1] = 1
    u = np.zeros(n_)
    u[1] = 1
    X = s * (np.outer(nv, u) @ J - np.outer(u, nv) @ J)
    return GroupElement(np.eye(n_) + X + X @ X / 2)


def schottky_pair(m: int = 2, t: float = 3.0, seed: int = 1):
    rng = np.random.default_rng(seed)
    k = random_k(m, rng)
    return [make_a(t, m), k @ make_a(t, m) @ k.inverse()]


def conjugated_trivial_family(m: int = 2, M: int = 3, seed: int = 5):
    """f = q0 o (z, 0) o p0 with symmetry pairs transported from
    {(a_1, block a_1), (k a_1 k^-1, block)}."""
    rng = np.random.default_rng(seed)
    p0 = random_element(m, rng)
    q0 = random_element(M, rng)
    f = compose(q0, trivial_embedding(m, M), p0)
    k = random_k(m, rng)
    gams = [make_a(1.0, m), k @ make_a(1.0, m) @ k.inverse()]
    pairs = [
        SymmetryPair(p0.inverse() @ g @ p0, q0 @ block_extension(g, M) @ q0.inverse()) for g in gams
    ]
    return f, pairs, p0, q0


# acceptance criterion results, printed at the end of the run
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def record(number: int, name: str, ok: bool, detail: str) -> bool:
    ACCEPTANCE[number] = (name, bool(ok), detail)
    return bool(ok)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d} {name}: {detail}")
