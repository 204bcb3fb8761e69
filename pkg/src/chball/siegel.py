"""Cayley transform to the Siegel domain, the boundary chart zeta and the
rescaling limit of polynomials under the straightened loxodromic flow.

Siegel domain: Im(z_1) > |z_2|^2 + ... + |z_m|^2.  Boundary chart:
zeta(x) = (Re F_1(x), F_2(x), ..., F_m(x)) in R x C^{m-1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .core import GroupElement
from .errors import DegenerateInputError, DimensionError, NotInGroupError, PreconditionError
from .maps.polynomial import Polynomial
from .normal_forms import block_residual_m, make_a


def cayley(z, tol: float | None = None) -> np.ndarray:
    """F(z) = (i(1 - z_1)/(1 + z_1), i z_j/(1 + z_1)); pole at -e_1."""
    tol = DEFAULT.tol_bdry if tol is None else tol
    z = np.asarray(z, dtype=complex)
    den = 1 + z[..., :1]
    if np.any(np.abs(den) <= tol):
        raise DegenerateInputError("F has a pole at -e_1")
    return np.concatenate([1j * (1 - z[..., :1]) / den, 1j * z[..., 1:] / den], axis=-1)


def cayley_inv(w, tol: float | None = None) -> np.ndarray:
    """F^{-1}(w) = ((i - w_1)/(w_1 + i), 2 w_j/(w_1 + i))."""
    tol = DEFAULT.tol_denom if tol is None else tol
    w = np.asarray(w, dtype=complex)
    den = w[..., :1] + 1j
    if np.any(np.abs(den) <= tol):
        raise DegenerateInputError("w_1 = -i is not in the closure of the Siegel domain")
    return np.concatenate([(1j - w[..., :1]) / den, 2 * w[..., 1:] / den], axis=-1)


def siegel_defect(w) -> np.ndarray:
    """Im(w_1) - sum |w_j|^2: positive inside, zero on the boundary."""
    w = np.asarray(w, dtype=complex)
    return w[..., 0].imag - np.sum(np.abs(w[..., 1:]) ** 2, axis=-1)


def zeta(x, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Boundary chart: (v, w) = (Re F_1(x), F_2(x), ..., F_m(x))."""
    F = cayley(x, tol)
    return F[..., 0].real, F[..., 1:]


def zeta_inv(v, w) -> np.ndarray:
    """Inverse chart, lifting (v, w) to the Siegel boundary v + i|w|^2."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=complex)
    first = v + 1j * np.sum(np.abs(w) ** 2, axis=-1)
    return cayley_inv(np.concatenate([first[..., None], w], axis=-1))


def m_block(k: GroupElement, tol: float | None = None) -> np.ndarray:
    """The U(m-1) block U of k = diag(1, U, 1) (up to the projective phase)."""
    tol = DEFAULT.tol_group if tol is None else tol
    if block_residual_m(k) > tol * 10:
        raise NotInGroupError("element is not of the block form diag(1, U, 1)")
    L = k.lift / k.lift[0, 0]
    return np.array(L[1:-1, 1:-1])


@dataclass(frozen=True)
class ConjugatedFlow:
    """phi(v, w) = (e^{-2t} v, e^{-t} U w) on R x C^{m-1}."""

    t: float
    U: np.ndarray

    def __call__(self, v, w):
        return self.iterate(v, w, 1)

    def iterate(self, v, w, n: int):
        Un = np.linalg.matrix_power(self.U, n)
        return np.exp(-2 * n * self.t) * np.asarray(v), np.exp(-n * self.t) * (np.asarray(w) @ Un.T)


def conjugated_flow(k: GroupElement, t: float, tol: float | None = None) -> ConjugatedFlow:
    """zeta o (k a_t) o zeta^{-1} for k in M."""
    return ConjugatedFlow(float(t), m_block(k, tol))


def flow_conjugacy_residual(k: GroupElement, t: float, x, margin: float = 0.1) -> float:
    """max ||zeta(k a_t(x)) - phi(zeta(x))|| over boundary samples x with
    |1 + x_1| >= margin (away from the pole of the chart)."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    x = x[np.abs(1 + x[:, 0]) >= margin]
    flow = conjugated_flow(k, t)
    g = k @ make_a(t, k.m)
    v1, w1 = zeta(g(x))
    v0, w0 = zeta(x)
    v2, w2 = flow(v0, w0)
    return float(np.max(np.sqrt((v1 - v2) ** 2 + np.sum(np.abs(w1 - w2) ** 2, axis=-1))))


# ---------------------------------------------------------------------------
# rescaling limit


def chart_variables(v, w) -> np.ndarray:
    """(v, Re w_1, Im w_1, ..., Re w_{m-1}, Im w_{m-1}) as a real array."""
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=complex)
    parts = [v[..., None]]
    for j in range(w.shape[-1]):
        parts += [w[..., j:j + 1].real, w[..., j:j + 1].imag]
    return np.concatenate(parts, axis=-1)


def weight(exps) -> int:
    """2 alpha + |beta| for the exponent vector (alpha, beta)."""
    return 2 * exps[0] + sum(exps[1:])


@dataclass
class RescalingProblem:
    h: Polynomial
    t: float
    U: np.ndarray

    def __post_init__(self):
        self.U = np.atleast_2d(np.asarray(self.U, dtype=complex))
        k = self.U.shape[0]
        if self.h.nvars != 1 + 2 * k:
            raise DimensionError(f"h must have {1 + 2 * k} variables (v, Re w, Im w)")
        if self.h.is_zero():
            raise PreconditionError("h must be a nonzero polynomial")
        if any(abs(c.imag) > 1e-14 * max(1.0, abs(c)) for c in self.h.terms.values()):
            raise PreconditionError("h must have real coefficients")
        if not self.t > 0:
            raise PreconditionError("t must be positive")
        if np.linalg.norm(self.U.conj().T @ self.U - np.eye(k)) > DEFAULT.tol_group * max(1, k):
            raise NotInGroupError("U is not unitary")

    @property
    def N(self) -> int:
        return min(weight(e) for e in self.h.terms)

    @property
    def P(self) -> Polynomial:
        N = self.N
        return Polynomial(self.h.nvars, {e: c for e, c in self.h.terms.items() if weight(e) == N})

    @property
    def flow(self) -> ConjugatedFlow:
        return ConjugatedFlow(self.t, self.U)

    def rescaled(self, v, w, n: int) -> np.ndarray:
        """e^{N n t} h(phi^n(v, w)), evaluated term by term so that the large
        prefactor never multiplies an already tiny value."""
        N = self.N
        Un = np.linalg.matrix_power(self.U, n)
        X = chart_variables(v, np.asarray(w) @ Un.T)
        out = np.zeros(X.shape[:-1])
        for e, c in self.h.terms.items():
            term = np.full(X.shape[:-1], c.real * np.exp(-n * self.t * (weight(e) - N)))
            for i, k in enumerate(e):
                if k:
                    term = term * X[..., i] ** k
            out = out + term
        return out


def recurrence_times(U, tol_u: float | None = None, count: int = 4, budget: int = 100_000) -> list[int]:
    """The first ``count`` exponents n >= 1 with ||U^n - I||_F <= tol_u."""
    tol_u = DEFAULT.tol_u if tol_u is None else tol_u
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    I = np.eye(U.shape[0])
    P = np.eye(U.shape[0], dtype=complex)
    out = []
    for n in range(1, budget + 1):
        P = P @ U
        if np.linalg.norm(P - I) <= tol_u:
            out.append(n)
            if len(out) == count:
                return out
    if not out:
        raise PreconditionError(f"U^n is not within {tol_u:g} of the identity for any n <= {budget}")
    return out


@dataclass
class RescalingReport:
    N: int
    n_list: list[int]
    gaps: np.ndarray  # (len(n_list), n_samples)
    max_gap: list[float]
    decreasing: bool
    C_fit: float
    envelope_ok: bool


def rescaling_limit(prob: RescalingProblem, n_list, v, w, tol_u: float | None = None) -> RescalingReport:
    """Gaps |e^{N n t} h(phi^n(v, w)) - P(v, w)| for n in n_list.

    The envelope constant C is fitted at the first n as
    max gap e^{n t} / ||(v, w)||^{N+1}; later gaps must stay below
    10 C ||(v, w)||^{N+1} e^{-n t}.
    """
    tol_u = DEFAULT.tol_u if tol_u is None else tol_u
    n_list = [int(n) for n in n_list]
    if not n_list or any(n < 1 for n in n_list):
        raise PreconditionError("n_list must contain positive integers")
    I = np.eye(prob.U.shape[0])
    for n in n_list:
        if np.linalg.norm(np.linalg.matrix_power(prob.U, n) - I) > tol_u:
            raise PreconditionError(f"U^{n} is not within tol_u of the identity; use recurrence_times")
    v = np.asarray(v, dtype=float)
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    P = prob.P
    target = P(chart_variables(v, w)).real
    gaps = np.array([np.abs(prob.rescaled(v, w, n) - target) for n in n_list])
    norm = np.sqrt(v**2 + np.sum(np.abs(w) ** 2, axis=-1))
    scale = np.maximum(norm, 1e-300) ** (prob.N + 1)
    C = float(np.max(gaps[0] * np.exp(n_list[0] * prob.t) / scale))
    env = 10 * C * scale[None, :] * np.exp(-np.array(n_list)[:, None] * prob.t)
    slack = 1e-14 * (1 + np.abs(target))
    # sup over the sample box; pointwise gaps need not be monotone
    sup = gaps.max(axis=1)
    decreasing = bool(np.all(np.diff(sup) <= 1e-14 * (1 + np.abs(target).max())))
    return RescalingReport(
        prob.N, n_list, gaps, [float(g.max()) for g in gaps], decreasing, C,
        bool(np.all(gaps <= env + slack)),
    )
