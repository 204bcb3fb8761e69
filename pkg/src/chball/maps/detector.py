"""Detector functions h_n testing whether f maps the complex line through
two boundary points x, y into a single complex affine line."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import DEFAULT
from ..core import boundary_point, line_through
from ..errors import DegenerateInputError, PreconditionError
from .rational import RationalProperMap


@dataclass
class DetectorSetup:
    f: RationalProperMap
    x: np.ndarray
    y0: np.ndarray
    u_basis: np.ndarray  # M x (M-1), orthonormal, orthogonal to f(z(y0)) - f(x)
    n_max: int = 8
    tol_det: float = DEFAULT.tol_det

    def z(self, y) -> np.ndarray:
        return (self.x + np.asarray(y, dtype=complex)) / 2

    def A(self, y) -> np.ndarray:
        """[f(z(y)) - f(x), u_2, ..., u_M]."""
        first = self.f(self.z(y)) - self.f(self.x)
        return np.column_stack([first, self.u_basis])

    def det_normalized(self, y) -> float:
        """|det A(y)| with the first column scaled to unit length."""
        A = self.A(y)
        n0 = np.linalg.norm(A[:, 0])
        if n0 == 0:
            return 0.0
        A = A.copy()
        A[:, 0] /= n0
        return float(abs(np.linalg.det(A)))

    def sample_point(self, y, n: int) -> np.ndarray:
        """w_n = (2n+1)/(4n) y + (2n-1)/(4n) x."""
        y = np.asarray(y, dtype=complex)
        return (2 * n + 1) / (4 * n) * y + (2 * n - 1) / (4 * n) * self.x


def make_detector(
    f: RationalProperMap,
    x,
    y0,
    n_max: int = 8,
    seed: int = 0,
    tol_det: float | None = None,
    tol_bdry: float | None = None,
) -> DetectorSetup:
    """Complete f(z(y0)) - f(x) to a basis by Gram-Schmidt on random
    vectors, redrawing any vector that is nearly dependent."""
    tol_det = DEFAULT.tol_det if tol_det is None else tol_det
    x = boundary_point(x, tol_bdry)
    y0 = boundary_point(y0, tol_bdry)
    if np.linalg.norm(x - y0) <= DEFAULT.tol_line:
        raise PreconditionError("x and y must be distinct")
    v = f((x + y0) / 2) - f(x)
    nv = np.linalg.norm(v)
    if nv <= DEFAULT.tol_denom:
        raise DegenerateInputError("f(z(y0)) = f(x); the detector basis is undefined")
    rng = np.random.default_rng(seed)
    M = f.M
    cols = [v / nv]
    while len(cols) < M:
        u = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        u /= np.linalg.norm(u)
        for _ in range(2):
            for q in cols:
                u = u - np.vdot(q, u) * q
        nu = np.linalg.norm(u)
        if nu > 1e-3:
            cols.append(u / nu)
    setup = DetectorSetup(f, x, y0, np.column_stack(cols[1:]) if M > 1 else np.zeros((1, 0)), n_max, tol_det)
    if setup.det_normalized(y0) < tol_det:
        raise DegenerateInputError("det A(y0) is below tol_det")
    return setup


def h0(y) -> float:
    """1 - ||y||^2."""
    y = np.asarray(y, dtype=complex)
    return float(1 - np.vdot(y, y).real)


def detector_h(setup: DetectorSetup, y, n: int) -> float:
    """h_n(y) = ||pi[A(y)^{-1}(f(w_n) - f(x))]||^2, pi dropping the first entry."""
    if n < 1:
        raise ValueError("n must be at least 1")
    y = np.asarray(y, dtype=complex)
    if setup.det_normalized(y) < setup.tol_det:
        raise DegenerateInputError(
            "det A(y) is below tol_det: y is outside the working neighborhood; shrink it"
        )
    rhs = setup.f(setup.sample_point(y, n)) - setup.f(setup.x)
    coef = np.linalg.solve(setup.A(y), rhs)
    return float(np.sum(np.abs(coef[1:]) ** 2))


def chord_points(x, y, n_points: int = 32) -> np.ndarray:
    """Points of the closed disc L_xy ∩ closed ball: half on the rim circle,
    half on the circle of half the radius (rotated by half a step)."""
    L = line_through(x, y)
    rad = L.disc_radius()
    k = n_points // 2
    th = 2 * np.pi * np.arange(k) / k
    rim = L.point(rad * np.exp(1j * th))
    inner = L.point(0.5 * rad * np.exp(1j * (th + np.pi / k)))
    return np.concatenate([rim, inner])


def image_line_residual(f: RationalProperMap, points) -> float:
    """Max distance of f(points) from their best-fit complex affine line."""
    W = f(points)
    C = W - W.mean(axis=0)
    _, _, vh = np.linalg.svd(C, full_matrices=False)
    d = vh[0]  # rows of C are multiples of vh[0] when collinear
    proj = np.outer(C @ d.conj(), d)
    return float(np.max(np.linalg.norm(C - proj, axis=1)))


@dataclass
class MembershipReport:
    member: bool
    detector_pass: bool
    direct_pass: bool
    h0: float
    h_values: list[float] = field(default_factory=list)
    line_residual: float = 0.0

    def as_dict(self):
        return dict(self.__dict__)


def z_x_membership(
    f: RationalProperMap,
    x,
    y,
    n_max: int = 8,
    tol: float | None = None,
    seed: int = 0,
    n_points: int = 32,
) -> MembershipReport:
    """Is y in Z_x?  The detector test needs h_0(y) <= tol and h_n(y) <= tol
    for 1 <= n <= n_max; the direct test fits a line through the images of
    ``n_points`` points of L_xy ∩ closed ball.  Membership needs both."""
    tol = DEFAULT.tol_line if tol is None else tol
    setup = make_detector(f, x, y, n_max=n_max, seed=seed)
    y = setup.y0
    hs = [detector_h(setup, y, n) for n in range(1, n_max + 1)]
    a0 = abs(h0(y))
    det_ok = bool(a0 <= tol and max(hs) <= tol)
    resid = image_line_residual(f, chord_points(setup.x, y, n_points))
    direct_ok = bool(resid <= tol)
    return MembershipReport(det_ok and direct_ok, det_ok, direct_ok, a0, hs, resid)
