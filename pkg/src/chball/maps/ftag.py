"""Fitting fractional linear maps w = (Az + b)/(c^T z + d) to samples.

Direct linear transform: each sample contributes the rows
w_i (c^T z + d) - (A_i z + b_i) = 0, linear in the entries of
g = [[A, b], [c^T, d]], whose nullspace is found by SVD.  The
anti-holomorphic branch repeats the fit with conj(z) in place of z.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT
from ..core import homogenize
from ..errors import DegenerateImage, NoFractionalLinearModel, PreconditionError


class Branch(str, enum.Enum):
    HOLOMORPHIC = "Holomorphic"
    ANTIHOLOMORPHIC = "AntiHolomorphic"

    def __str__(self):
        return self.value


@dataclass
class FtagFit:
    g: np.ndarray
    branch: Branch
    residual: float
    other_residual: float
    nullity: int

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.branch == Branch.ANTIHOLOMORPHIC:
            z = np.conj(z)
        v = homogenize(z) @ self.g.T
        return v[..., :-1] / v[..., -1:]

    @property
    def branch_ratio(self) -> float:
        return self.other_residual / max(self.residual, np.finfo(float).tiny)


def _design(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    N, m = z.shape
    k = w.shape[1]
    Z = homogenize(z)
    n_in = m + 1
    rows = np.zeros((N, k, (k + 1) * n_in), dtype=complex)
    for i in range(k):
        rows[:, i, i * n_in:(i + 1) * n_in] = -Z
        rows[:, i, k * n_in:] = w[:, i:i + 1] * Z
    return rows.reshape(N * k, (k + 1) * n_in)


def _normalize(g: np.ndarray) -> np.ndarray:
    g = g * (np.sqrt(g.shape[1]) / np.linalg.norm(g))
    i = np.unravel_index(np.argmax(np.abs(g)), g.shape)
    return g * (np.conj(g[i]) / abs(g[i]))


def _algebraic_residual(g: np.ndarray, z: np.ndarray, w: np.ndarray) -> float:
    """max_s ||w_s (c^T z_s + d) - (A z_s + b)|| / ||(z_s, 1)||, with ||g||_F = 1."""
    g = g / np.linalg.norm(g)
    Z = homogenize(z)
    v = Z @ g.T
    r = w * v[:, -1:] - v[:, :-1]
    return float(np.max(np.linalg.norm(r, axis=1) / np.linalg.norm(Z, axis=1)))


def _fit_branch(z, w, tol):
    A = _design(z, w)
    col = np.linalg.norm(A, axis=0)
    col = np.where(col > 0, col, 1.0)
    _, s, vh = np.linalg.svd(A / col, full_matrices=False)
    nullity = int(np.sum(s <= tol * s[0]))
    theta = vh[-1].conj() / col
    k, n_in = w.shape[1], z.shape[1] + 1
    g = theta.reshape(k + 1, n_in)
    return g, nullity, _algebraic_residual(g, z, w)


def ftag_fit(z, w, tol: float | None = None, general_position_tol: float = 1e-8) -> FtagFit:
    """Fractional linear model of the samples w_s = F(z_s).

    Raises DegenerateImage when the images lie in a proper affine subspace
    and NoFractionalLinearModel when neither branch has a one-dimensional
    nullspace.
    """
    tol = DEFAULT.tol_ftag if tol is None else tol
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    if z.shape[0] != w.shape[0]:
        raise PreconditionError("z and w must have the same number of samples")
    m, k = z.shape[1], w.shape[1]
    if z.shape[0] < 2 * (m + 1) ** 2:
        raise PreconditionError(f"need at least {2 * (m + 1) ** 2} samples, got {z.shape[0]}")
    s = np.linalg.svd(w - w.mean(axis=0), compute_uv=False)
    if len(s) < k or s[k - 1] <= general_position_tol * max(s[0], 1e-300):
        raise DegenerateImage("sample images lie in a proper affine subspace")
    fits = {}
    for br, zz in ((Branch.HOLOMORPHIC, z), (Branch.ANTIHOLOMORPHIC, np.conj(z))):
        fits[br] = _fit_branch(zz, w, tol)
    good = [br for br, (_, nul, _) in fits.items() if nul == 1]
    if not good:
        best = min(fits.values(), key=lambda f: f[2])
        raise NoFractionalLinearModel(
            f"no fractional linear model fits (best residual {best[2]:.3g})", residual=best[2]
        )
    br = min(good, key=lambda b: fits[b][2])
    other = Branch.ANTIHOLOMORPHIC if br == Branch.HOLOMORPHIC else Branch.HOLOMORPHIC
    g, nul, res = fits[br]
    return FtagFit(_normalize(g), br, res, fits[other][2], nul)
