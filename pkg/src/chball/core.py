"""Matrix model of the ball automorphism group PU(m,1).

Points of the ball and its boundary are plain complex numpy arrays of shape
``(m,)`` (or ``(n, m)`` for batches), treated as column vectors.  A group
element is stored through one lift in U(m,1), i.e. a matrix ``g`` with
``g^* J g = J`` where ``J = diag(1, ..., 1, -1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import DegenerateInputError, DimensionError, NotInGroupError


def form_matrix(m: int) -> np.ndarray:
    """The diagonal sign matrix diag(1,...,1,-1) of size m+1."""
    J = np.ones(m + 1)
    J[-1] = -1.0
    return np.diag(J).astype(complex)


@dataclass(frozen=True)
class HermitianForm:
    """The signature (m,1) Hermitian form [v,w] = v_1 conj(w_1) + ... - v_{m+1} conj(w_{m+1})."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DimensionError("m must be at least 1")

    @property
    def J(self) -> np.ndarray:
        return form_matrix(self.m)

    def __call__(self, v, w) -> complex:
        return form_value(v, w, self)


def form_value(v, w, form: HermitianForm | None = None):
    """Evaluate [v, w]_{m,1}.  Accepts batches along the leading axes."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape[-1] != w.shape[-1]:
        raise DimensionError(f"vector lengths differ: {v.shape[-1]} vs {w.shape[-1]}")
    if form is not None and v.shape[-1] != form.m + 1:
        raise DimensionError(f"expected vectors of length {form.m + 1}, got {v.shape[-1]}")
    prod = v * np.conj(w)
    return prod[..., :-1].sum(axis=-1) - prod[..., -1]


def homogenize(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    ones = np.ones(z.shape[:-1] + (1,), dtype=complex)
    return np.concatenate([z, ones], axis=-1)


def dehomogenize(v, tol_denom: float = 0.0) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    last = v[..., -1:]
    scale = np.max(np.abs(v), axis=-1, keepdims=True)
    if np.any(np.abs(last) <= tol_denom * scale):
        raise DegenerateInputError("homogeneous vector has vanishing last coordinate")
    return v[..., :-1] / last


def _pin_phase(lift: np.ndarray) -> np.ndarray:
    # |d| >= 1 for every U(m,1) matrix, so making d real positive is always defined
    d = lift[-1, -1]
    return lift * (np.conj(d) / abs(d))


class GroupElement:
    """An automorphism of the unit ball B^m, stored as a pinned U(m,1) lift.

    The constructor rescales any nonzero multiple of a U(m,1) matrix to
    satisfy ``g^* J g = J`` and rotates the phase so that the bottom-right
    entry is real and positive.  Two lifts of the same automorphism therefore
    produce the same stored matrix up to rounding.
    """

    __slots__ = ("_lift", "m")

    def __init__(self, lift, *, check: bool = True, tol: float | None = None):
        lift = np.array(lift, dtype=complex)
        if lift.ndim != 2 or lift.shape[0] != lift.shape[1] or lift.shape[0] < 2:
            raise DimensionError(f"lift must be square of size >= 2, got {lift.shape}")
        m = lift.shape[0] - 1
        J = form_matrix(m)
        gram = lift.conj().T @ J @ lift
        mu = np.real(np.trace(J @ gram)) / (m + 1)
        if not np.isfinite(mu) or mu <= 0:
            raise NotInGroupError("matrix is not a positive multiple of a U(m,1) element")
        lift = lift / np.sqrt(mu)
        if abs(lift[-1, -1]) == 0:
            raise NotInGroupError("bottom-right entry vanishes; not in U(m,1)")
        lift = _pin_phase(lift)
        if check:
            tol = DEFAULT.tol_group if tol is None else tol
            err = np.linalg.norm(lift.conj().T @ J @ lift - J)
            if err > tol * np.linalg.norm(lift) ** 2:
                raise NotInGroupError(f"U(m,1) membership residual {err:.3e} exceeds tolerance")
        lift.setflags(write=False)
        self._lift = lift
        self.m = m

    @classmethod
    def _trusted(cls, lift: np.ndarray) -> "GroupElement":
        # products and inverses of stored lifts satisfy g^* J g = J already;
        # re-estimating the scale from g^* J g cancels badly when |g| is large
        lift = _pin_phase(np.array(lift, dtype=complex))
        lift.setflags(write=False)
        obj = cls.__new__(cls)
        obj._lift = lift
        obj.m = lift.shape[0] - 1
        return obj

    @classmethod
    def identity(cls, m: int) -> "GroupElement":
        return cls(np.eye(m + 1))

    @property
    def lift(self) -> np.ndarray:
        return self._lift

    @property
    def A(self) -> np.ndarray:
        return self._lift[:-1, :-1]

    @property
    def b(self) -> np.ndarray:
        return self._lift[:-1, -1]

    @property
    def c(self) -> np.ndarray:
        return self._lift[-1, :-1]

    @property
    def d(self) -> complex:
        return self._lift[-1, -1]

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.m != self.m:
            raise DimensionError("cannot compose elements of different dimension")
        return GroupElement._trusted(self._lift @ other._lift)

    def inverse(self) -> "GroupElement":
        J = form_matrix(self.m)
        return GroupElement._trusted(J @ self._lift.conj().T @ J)

    def __call__(self, z, tol_denom: float | None = None):
        return act(self, z, tol_denom)

    def power(self, n: int) -> "GroupElement":
        """g**n by repeated squaring (n may be negative)."""
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        result = np.eye(self.m + 1, dtype=complex)
        sq = base._lift.copy()
        while n:
            if n & 1:
                result = result @ sq
            n >>= 1
            if n:
                sq = sq @ sq
        if not np.all(np.isfinite(result)):
            raise DegenerateInputError("power overflows double precision")
        return GroupElement._trusted(result)

    def membership_residual(self) -> float:
        J = form_matrix(self.m)
        return float(np.linalg.norm(self._lift.conj().T @ J @ self._lift - J))

    def distance(self, other: "GroupElement") -> float:
        """Projective distance min_{|mu|=1} ||g - mu h||_F."""
        a, b = self._lift, other._lift
        inner = np.vdot(b, a)
        mu = inner / abs(inner) if inner != 0 else 1.0
        return float(np.linalg.norm(a - mu * b))

    def isclose(self, other: "GroupElement", tol: float = 1e-9) -> bool:
        return self.m == other.m and self.distance(other) <= tol

    def __repr__(self):
        return f"GroupElement(m={self.m}, lift=\n{np.array2string(self._lift, precision=6)})"


def act(g: GroupElement, z, tol_denom: float | None = None):
    """g(z) = (Az + b) / (c^T z + d), batched over leading axes of z."""
    tol_denom = DEFAULT.tol_denom if tol_denom is None else tol_denom
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != g.m:
        raise DimensionError(f"point has {z.shape[-1]} coordinates, element acts on C^{g.m}")
    return apply_lift(g.lift, z, tol_denom)


def apply_lift(lift: np.ndarray, z, tol_denom: float = 0.0):
    """Projective action of an arbitrary (m+1)x(m+1) matrix on points z."""
    z = np.asarray(z, dtype=complex)
    num = z @ lift[:-1, :-1].T + lift[:-1, -1]
    den = z @ lift[-1, :-1] + lift[-1, -1]
    scale = np.linalg.norm(lift[-1])
    if np.any(np.abs(den) < tol_denom * scale):
        raise DegenerateInputError(
            "denominator c^T z + d vanishes; point outside the closed ball or invalid element"
        )
    return num / np.expand_dims(den, -1)


def act_difference(g: GroupElement, z, delta):
    """g(z + delta) - g(z) without cancellation when delta is tiny."""
    z = np.asarray(z, dtype=complex)
    delta = np.asarray(delta, dtype=complex)
    den0 = z @ g.c + g.d
    dden = delta @ g.c
    num = np.expand_dims(den0, -1) * (delta @ g.A.T) - (z @ g.A.T + g.b) * np.expand_dims(dden, -1)
    return num / np.expand_dims(den0 * (den0 + dden), -1)


def ball_point(z, tol: float = 0.0) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(np.linalg.norm(z, axis=-1) >= 1 - tol):
        raise DegenerateInputError("point is not inside the open unit ball")
    return z


def boundary_point(x, tol: float | None = None) -> np.ndarray:
    """Validate |x| = 1 within tol_bdry and renormalize to exact unit norm."""
    tol = DEFAULT.tol_bdry if tol is None else tol
    x = np.asarray(x, dtype=complex)
    r = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(np.abs(r - 1) > tol):
        raise DegenerateInputError("point is not on the unit sphere")
    return x / r


@dataclass(frozen=True, eq=False)
class AffineLine:
    """Complex affine line {base + lam * direction}, kept in canonical form.

    Canonical: unit direction whose first entry of non-negligible modulus is
    real positive, and base equal to the point of the line closest to 0.
    """

    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.base, dtype=complex).copy()
        b = np.asarray(self.direction, dtype=complex).copy()
        if a.shape != b.shape or a.ndim != 1:
            raise DimensionError("base and direction must be vectors of equal length")
        nb = np.linalg.norm(b)
        if nb == 0:
            raise DegenerateInputError("line direction must be nonzero")
        if not _is_canonical(a, b):
            b = b / nb
            i0 = int(np.argmax(np.abs(b) > 1e-8))
            b = b * (np.conj(b[i0]) / abs(b[i0]))
            b[i0] = b[i0].real
            a = a - np.vdot(b, a) * b
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "base", a)
        object.__setattr__(self, "direction", b)

    def canonical(self) -> "AffineLine":
        return AffineLine(self.base, self.direction)

    def distance(self, z) -> np.ndarray:
        """Distance from z (or a batch of points) to the line."""
        diff = np.asarray(z, dtype=complex) - self.base
        coef = diff @ np.conj(self.direction)
        return np.linalg.norm(diff - np.multiply.outer(coef, self.direction), axis=-1)

    def point(self, lam) -> np.ndarray:
        return self.base + np.multiply.outer(lam, self.direction)

    def isclose(self, other: "AffineLine", tol: float | None = None) -> bool:
        tol = DEFAULT.tol_line if tol is None else tol
        return bool(
            np.linalg.norm(self.base - other.base) <= tol
            and np.linalg.norm(self.direction - other.direction) <= tol
        )

    def disc_radius(self) -> float:
        """Radius of the disc L ∩ closed ball (negative if they do not meet)."""
        r2 = 1.0 - np.linalg.norm(self.base) ** 2
        return float(np.sqrt(r2)) if r2 >= 0 else -1.0


def _is_canonical(a, b) -> bool:
    if abs(np.linalg.norm(b) - 1) > 1e-15:
        return False
    i0 = int(np.argmax(np.abs(b) > 1e-8))
    if b[i0].imag != 0 or b[i0].real <= 0:
        return False
    return abs(np.vdot(b, a)) <= 1e-15 * max(1.0, np.linalg.norm(a))


def line_through(x, y, tol: float | None = None) -> AffineLine:
    tol = DEFAULT.tol_line if tol is None else tol
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.linalg.norm(x - y) <= tol:
        raise DegenerateInputError("points coincide; the line through them is undefined")
    return AffineLine(x, y - x)


def point_on_line(line: AffineLine, z, tol: float | None = None) -> bool:
    tol = DEFAULT.tol_line if tol is None else tol
    return bool(line.distance(z) <= tol)
