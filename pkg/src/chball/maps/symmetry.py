"""Symmetry pairs (phi, psi) with f o phi = psi o f."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT
from ..core import GroupElement, apply_lift, form_matrix, homogenize
from ..errors import DimensionError, InconclusiveError, NotLoxodromicError
from ..sampling import random_ball_points
from ..spectral import Kind, classify
from .rational import RationalProperMap


@dataclass(frozen=True)
class SymmetryPair:
    phi: GroupElement
    psi: GroupElement


def block_extension(gamma: GroupElement, M: int) -> GroupElement:
    """Automorphism of B^M acting as gamma on the first m coordinates and
    fixing the rest: the partner of gamma for the trivial embedding."""
    m = gamma.m
    if M < m:
        raise DimensionError("target dimension below source dimension")
    L = np.eye(M + 1, dtype=complex)
    g = gamma.lift
    L[:m, :m] = g[:m, :m]
    L[:m, M] = g[:m, m]
    L[M, :m] = g[m, :m]
    L[M, M] = g[m, m]
    return GroupElement._trusted(L)


def _interior_samples(m: int, n: int, seed: int, r_max: float = 0.95) -> np.ndarray:
    return random_ball_points(m, n, np.random.default_rng(seed), r_max=r_max)


def verify_symmetry_pair(
    f: RationalProperMap, phi: GroupElement, psi: GroupElement, n_samples: int = 200, seed: int = 0
) -> float:
    """max_z ||f(phi(z)) - psi(f(z))|| over random interior samples."""
    if phi.m != f.m or psi.m != f.M:
        raise DimensionError("pair dimensions do not match the map")
    z = _interior_samples(f.m, n_samples, seed)
    return float(np.max(np.linalg.norm(f(phi(z)) - psi(f(z)), axis=1)))


def _form_orthonormal_complement(S: np.ndarray, J: np.ndarray) -> np.ndarray:
    """Form-orthonormal basis of {v : S^* J v = 0}, from the standard basis.

    The form is positive definite there when S contains a negative vector.
    """
    n = J.shape[0]
    if S.shape[1] == n:
        return np.zeros((n, 0), dtype=complex)
    G = S.conj().T @ J @ S
    # J-orthogonal projector onto the complement: I - S G^{-1} S^* J
    P = np.eye(n) - S @ np.linalg.solve(G, S.conj().T @ J)
    cols = []
    for i in range(n):
        v = P[:, i]
        for _ in range(2):
            for w in cols:
                v = v - (w.conj() @ J @ v) * w
        nv = np.real(v.conj() @ J @ v)
        if nv > 1e-10:
            cols.append(v / np.sqrt(nv))
        if len(cols) == n - S.shape[1]:
            break
    return np.stack(cols, axis=1)


def _span_basis(V: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the column span of V."""
    u, s, _ = np.linalg.svd(V, full_matrices=False)
    r = int(np.sum(s > rel_tol * s[0]))
    return u[:, :r]


def _j_polish(L: np.ndarray, J: np.ndarray, steps: int = 4) -> np.ndarray:
    """Newton-type correction towards L^* J L = J."""
    for _ in range(steps):
        E = L.conj().T @ J @ L - J
        L = L @ (np.eye(len(J)) - 0.5 * J @ E)
    return L


def find_psi(
    f: RationalProperMap, phi: GroupElement, n_samples: int = 200, seed: int = 0
) -> tuple[GroupElement, float]:
    """Best psi in Aut(B^M) with f o phi ~ psi o f, and its residual.

    Raises InconclusiveError (``best`` = residual of the raw linear fit)
    when the fit cannot be corrected onto U(M,1), i.e. no partner exists.

    psi is fitted linearly on the span S of the homogeneous image vectors
    (f(z), 1), scaled to a form isometry there, and extended to the
    form-orthogonal complement of S by matching standard-basis-derived
    orthonormal bases, which is the identity when phi preserves S.
    """
    if phi.m != f.m:
        raise DimensionError("phi acts on the wrong ball")
    M = f.M
    n = M + 1
    J = form_matrix(M)
    z = _interior_samples(f.m, n_samples, seed, r_max=0.9)
    F = homogenize(f(z))
    T = homogenize(f(phi(z)))
    Q = _span_basis(F.T)
    R = _span_basis(T.T)
    r = Q.shape[1]
    if R.shape[1] != r:
        raise InconclusiveError("image spans differ in dimension; no automorphism can match them")
    C = F @ Q.conj()  # coefficients of each sample in the basis Q
    # unknown B (n x r) with B c ~ T: rows (B c)_i - T_i (B c)_n = 0
    rows = []
    for i in range(M):
        blk = np.zeros((len(z), n, r), dtype=complex)
        blk[:, i, :] = C
        blk[:, M, :] = -T[:, i : i + 1] * C
        rows.append(blk.reshape(len(z), n * r))
    A = np.concatenate(rows)
    _, s, vh = np.linalg.svd(A, full_matrices=False)
    if r * n > 1 and s[-2] <= 1e-10 * s[0]:
        raise InconclusiveError("fit matrix is rank deficient; psi is not determined by the samples")
    B = vh[-1].conj().reshape(n, r)
    # scale so that B is a form isometry on S
    GS = Q.conj().T @ J @ Q
    GB = B.conj().T @ J @ B
    mu2 = np.real(np.vdot(GS, GB)) / np.real(np.vdot(GS, GS))
    if mu2 == 0:
        raise InconclusiveError("fitted restriction is form-null; no automorphism fits")
    # mu2 < 0 means no automorphism fits; continue so the residual is reported
    B = B / np.sqrt(abs(mu2))
    # the SVD phase is arbitrary; pin the d entry of psi restricted to S
    d = (B @ Q.conj().T)[M, M]
    if abs(d) > 1e-12:
        B = B * (np.conj(d) / abs(d))
    P = _form_orthonormal_complement(Q, J)
    P2 = _form_orthonormal_complement(B, J)
    L = np.concatenate([B, P2], axis=1) @ np.linalg.inv(np.concatenate([Q, P], axis=1))
    raw = L
    with np.errstate(all="ignore"):
        L = _j_polish(L, J)
    err = np.linalg.norm(L.conj().T @ J @ L - J) if np.all(np.isfinite(L)) else np.inf
    if not err <= 1e-8 * max(1.0, np.linalg.norm(L) ** 2):
        zz = _interior_samples(f.m, n_samples, seed + 1)
        raw_res = float(np.max(np.linalg.norm(f(phi(zz)) - apply_lift(raw, f(zz)), axis=1)))
        raise InconclusiveError(
            f"no automorphism fits: the linear fit (residual {raw_res:.3g}) cannot be "
            "corrected onto U(M,1)",
            best=raw_res,
        )
    psi = GroupElement(L, check=False)
    return psi, verify_symmetry_pair(f, phi, psi, n_samples, seed + 1)


@dataclass
class LoxoPairReport:
    psi_kind: str
    lambda_phi: float
    lambda_psi: float
    upper_ok: bool
    lower_ok: bool | None
    axis_residual: float
    passed: bool

    def as_dict(self):
        return dict(self.__dict__)


def check_loxo_pair(
    f: RationalProperMap,
    pair: SymmetryPair,
    alpha: float | None = None,
    n_line: int = 64,
    tol_line: float | None = None,
    rel_slack: float = 1e-9,
) -> LoxoPairReport:
    """Loxodromic partner check: psi loxodromic, lambda_1(phi)^alpha <=
    lambda_1(psi) <= lambda_1(phi), and f(L_phi) inside L_psi."""
    tol_line = DEFAULT.tol_line if tol_line is None else tol_line
    dphi = classify(pair.phi)
    if dphi.kind != Kind.LOXODROMIC:
        raise NotLoxodromicError(f"phi is {dphi.kind.value}, not loxodromic")
    dpsi = classify(pair.psi)
    lp, lq = dphi.lambda1, dpsi.lambda1
    upper = bool(lq <= lp * (1 + rel_slack))
    lower = None if alpha is None else bool(lq >= lp**alpha * (1 - rel_slack))
    axis_res = np.inf
    if dpsi.kind == Kind.LOXODROMIC:
        L = dphi.axis
        rad = L.disc_radius()
        k = np.arange(n_line)
        # points on the closed disc L_phi ∩ closed ball, including its rim
        rho = rad * np.sqrt((k % 8 + 1) / 8.0)
        theta = 2 * np.pi * k / n_line
        w = L.point(rho * np.exp(1j * theta))
        axis_res = float(np.max(dpsi.axis.distance(f(w))))
    passed = bool(
        dpsi.kind == Kind.LOXODROMIC and upper and (lower is not False) and axis_res <= tol_line
    )
    return LoxoPairReport(dpsi.kind.value, lp, lq, upper, lower, axis_res, passed)
