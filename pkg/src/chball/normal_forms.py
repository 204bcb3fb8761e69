"""The subgroups A, K, M and the KAK / loxodromic normal forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .core import GroupElement, act, form_matrix, form_value, homogenize
from .errors import DegenerateInputError, DimensionError, NotInGroupError, NotLoxodromicError


def make_a(t: float, m: int) -> GroupElement:
    """The hyperbolic flow a_t along the e_1 axis."""
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    g = np.eye(m + 1, dtype=complex)
    g[0, 0] = g[m, m] = np.cosh(t)
    g[0, m] = g[m, 0] = np.sinh(t)
    return GroupElement._trusted(g)


def _check_unitary(U: np.ndarray, tol: float):
    err = np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0]))
    if err > tol * max(1, U.shape[0]):
        raise NotInGroupError(f"matrix is not unitary (residual {err:.2e})")


def make_k(U, tol: float | None = None) -> GroupElement:
    """Element of K = Stab(0): block diag(U, 1) with U in U(m)."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    _check_unitary(U, DEFAULT.tol_group if tol is None else tol)
    m = U.shape[0]
    g = np.eye(m + 1, dtype=complex)
    g[:m, :m] = U
    return GroupElement._trusted(g)


def make_m(U, m: int | None = None, tol: float | None = None) -> GroupElement:
    """Element of M (centralizer of A in K): block diag(1, U, 1) with U in U(m-1)."""
    U = np.asarray(U, dtype=complex)
    if U.size == 0:
        if m is None:
            raise DimensionError("m must be given for an empty U block")
        U = np.zeros((0, 0), dtype=complex)
    else:
        U = np.atleast_2d(U)
        _check_unitary(U, DEFAULT.tol_group if tol is None else tol)
    mm = U.shape[0] + 1
    if m is not None and m != mm:
        raise DimensionError(f"U block of size {U.shape[0]} does not fit m={m}")
    g = np.eye(mm + 1, dtype=complex)
    g[1:mm, 1:mm] = U
    return GroupElement._trusted(g)


def block_residual_k(g: GroupElement) -> float:
    """Distance of g from the block pattern [[U,0],[0,1]] (projectively)."""
    L = g.lift / g.d
    return float(np.sqrt(np.linalg.norm(L[:-1, -1]) ** 2 + np.linalg.norm(L[-1, :-1]) ** 2 + abs(L[-1, -1] - 1) ** 2))


def block_residual_m(g: GroupElement) -> float:
    """Distance of g from the M pattern diag(1, U, 1) (projectively)."""
    L = g.lift / g.d
    mask = np.ones_like(L, dtype=bool)
    mask[1:-1, 1:-1] = False
    target = np.zeros_like(L)
    target[0, 0] = target[-1, -1] = 1
    return float(np.linalg.norm((L - target)[mask]))


def unitary_completion(u) -> np.ndarray:
    """Unitary matrix whose first column is the unit vector u.

    Modified Gram-Schmidt against the standard basis, taking the basis
    vectors in order of increasing overlap with u (pivoting) and
    re-orthogonalizing once.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    cols = [u / np.linalg.norm(u)]
    for i in np.argsort(np.abs(u), kind="stable"):
        if len(cols) == n:
            break
        v = np.zeros(n, dtype=complex)
        v[i] = 1.0
        for _ in range(2):
            for q in cols:
                v = v - np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    return np.stack(cols, axis=1)


def transvection(p) -> GroupElement:
    """The automorphism k a_t k^{-1} carrying 0 to the interior point p."""
    p = np.asarray(p, dtype=complex)
    m = p.shape[0]
    r = np.linalg.norm(p)
    if r >= 1:
        raise DegenerateInputError("point is not inside the ball")
    if r == 0:
        return GroupElement.identity(m)
    k = make_k(unitary_completion(p / r))
    return k @ make_a(np.arctanh(r), m) @ k.inverse()


@dataclass(frozen=True)
class KAKFactors:
    k1: GroupElement
    t: float
    k2: GroupElement

    def compose(self) -> GroupElement:
        return self.k1 @ make_a(self.t, self.k1.m) @ self.k2

    def residual(self, g: GroupElement) -> float:
        return self.compose().distance(g)


def kak(g: GroupElement, tol: float | None = None) -> KAKFactors:
    """g = k1 a_t k2 following the constructive argument: rotate g(0) onto the
    positive e_1 axis, read off t, and derive k2 = a_t^{-1} k1^{-1} g."""
    tol = DEFAULT.tol_group if tol is None else tol
    m = g.m
    p = act(g, np.zeros(m))
    r = float(np.linalg.norm(p))
    if r >= 1 - 1e-15:
        raise DegenerateInputError(
            "|g(0)| is numerically 1; the input is not a valid bounded automorphism"
        )
    k1 = make_k(unitary_completion(p / r)) if r > 0 else GroupElement.identity(m)
    t = float(np.arctanh(r))
    k2 = make_a(-t, m) @ k1.inverse() @ g
    scale = max(1.0, np.linalg.norm(g.lift))
    if block_residual_k(k2) > tol * scale**2:
        raise NotInGroupError(f"derived k2 is not in K (residual {block_residual_k(k2):.2e})")
    return KAKFactors(k1, t, k2)


@dataclass(frozen=True)
class LoxodromicNormalForm:
    h: GroupElement
    k: GroupElement
    t: float

    def compose(self) -> GroupElement:
        return self.h @ self.k @ make_a(self.t, self.h.m) @ self.h.inverse()


def pair_mover(x_plus, x_minus) -> GroupElement:
    """An automorphism h with h(e_1) = x_plus and h(-e_1) = x_minus.

    The null lines (x_plus, 1) and (x_minus, 1) are rescaled so their form
    pairing matches that of (e_1, 1) and (-e_1, 1); the remaining columns are
    a form-orthonormal basis of their (positive definite) orthogonal
    complement.
    """
    x_plus = np.asarray(x_plus, dtype=complex)
    x_minus = np.asarray(x_minus, dtype=complex)
    m = x_plus.shape[0]
    J = form_matrix(m)
    p = homogenize(x_plus)
    q0 = homogenize(x_minus)
    pq = form_value(p, q0)
    if abs(pq) < 1e-14:
        raise DegenerateInputError("fixed points coincide")
    q = np.conj(-2.0 / pq) * q0
    col1 = (p - q) / 2
    col_last = (p + q) / 2
    # form-orthogonal complement of span(p, q): x with p^* J x = q^* J x = 0
    constraints = np.stack([p.conj() @ J, q.conj() @ J])
    _, _, vh = np.linalg.svd(constraints)
    comp = vh[2:].conj().T
    cols = []
    for i in range(comp.shape[1]):
        v = comp[:, i]
        for _ in range(2):
            for w in cols:
                v = v - form_value(v, w) * w
        v = v / np.sqrt(np.real(form_value(v, v)))
        cols.append(v)
    h = np.column_stack([col1] + cols + [col_last])
    return GroupElement(h)


def loxodromic_normal_form(g: GroupElement, tol: float | None = None) -> LoxodromicNormalForm:
    """g = h k a_t h^{-1} with k in M and t = log lambda_1(g) > 0."""
    from .spectral import classify

    tol = DEFAULT.tol_group if tol is None else tol
    data = classify(g)
    if data.kind != "Loxodromic":
        raise NotLoxodromicError(f"element is {data.kind}, not loxodromic")
    h = pair_mover(data.fixed_plus, data.fixed_minus)
    t = float(np.log(data.lambda1))
    k = h.inverse() @ g @ h @ make_a(-t, g.m)
    scale = np.linalg.norm(h.lift) ** 2
    if block_residual_m(k) > 1e3 * tol * scale * max(1.0, np.linalg.norm(g.lift)):
        raise NotInGroupError(f"recovered k is not in M (residual {block_residual_m(k):.2e})")
    # snap to the exact block pattern
    L = np.array(k.lift / k.d)
    U = L[1:-1, 1:-1]
    u, _, vh = np.linalg.svd(U) if U.size else (U, None, U)
    k = make_m(u @ vh if U.size else U, m=g.m)
    return LoxodromicNormalForm(h, k, t)
