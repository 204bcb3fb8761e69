"""Rational proper maps between balls: evaluation, fixtures, composition
with ball automorphisms and boundary diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT
from ..core import GroupElement
from ..errors import DegenerateInputError, DimensionError, PreconditionError
from ..normal_forms import transvection
from ..sampling import random_ball_points, random_sphere_points
from .polynomial import Polynomial


class RationalProperMap:
    """f = (p_1, ..., p_M) / q with polynomials in z_1, ..., z_m."""

    __slots__ = ("m", "M", "numerator", "denominator")

    def __init__(self, numerator, denominator: Polynomial):
        numerator = tuple(numerator)
        if not numerator:
            raise DimensionError("numerator must have at least one component")
        m = denominator.nvars
        if any(p.nvars != m for p in numerator):
            raise DimensionError("numerator and denominator use different variable counts")
        if denominator.is_zero():
            raise DegenerateInputError("denominator is the zero polynomial")
        self.m = m
        self.M = len(numerator)
        self.numerator = numerator
        self.denominator = denominator

    @property
    def degree(self) -> int:
        return max([self.denominator.degree()] + [p.degree() for p in self.numerator])

    def __call__(self, z, tol_denom: float | None = None):
        tol_denom = DEFAULT.tol_denom if tol_denom is None else tol_denom
        z = np.asarray(z, dtype=complex)
        if z.shape[-1] != self.m:
            raise DimensionError(f"point has {z.shape[-1]} coordinates, map is defined on C^{self.m}")
        q = self.denominator(z)
        if np.any(np.abs(q) < tol_denom * self.denominator.max_abs_coeff()):
            raise DegenerateInputError("denominator vanishes numerically at an evaluation point")
        num = np.stack([p(z) for p in self.numerator], axis=-1)
        return num / q[..., None]

    def normalized(self) -> "RationalProperMap":
        """Same map with the largest denominator coefficient scaled to 1."""
        c = max(self.denominator.terms.values(), key=abs)
        return RationalProperMap([p * (1 / c) for p in self.numerator], self.denominator * (1 / c))

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "M": self.M,
            "numerator": [p.to_json() for p in self.numerator],
            "denominator": self.denominator.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RationalProperMap":
        m = int(data["m"])
        num = [Polynomial.from_json(p, m) for p in data["numerator"]]
        if len(num) != int(data["M"]):
            raise DimensionError("numerator length does not match M")
        return cls(num, Polynomial.from_json(data["denominator"], m))


def trivial_embedding(m: int, M: int) -> RationalProperMap:
    """z -> (z, 0)."""
    if M < m:
        raise DimensionError("M must be at least m")
    num = [Polynomial.variable(i, m) for i in range(m)] + [Polynomial(m) for _ in range(M - m)]
    return RationalProperMap(num, Polynomial.constant(1.0, m))


def quadratic_map() -> RationalProperMap:
    """(z1^2, sqrt(2) z1 z2, z2^2): B^2 -> B^3, with ||f(z)|| = ||z||^2."""
    z1, z2 = Polynomial.variable(0, 2), Polynomial.variable(1, 2)
    return RationalProperMap([z1 * z1, np.sqrt(2) * (z1 * z2), z2 * z2], Polynomial.constant(1.0, 2))


def quadratic_symmetry(U) -> np.ndarray:
    """The unitary S(U) with f(Uz) = S(U) f(z) for the quadratic map."""
    U = np.asarray(U, dtype=complex)
    (a, b), (c, d) = U
    r2 = np.sqrt(2)
    return np.array(
        [
            [a * a, r2 * a * b, b * b],
            [r2 * a * c, a * d + b * c, r2 * b * d],
            [c * c, r2 * c * d, d * d],
        ]
    )


def _precompose(f: RationalProperMap, phi: GroupElement) -> RationalProperMap:
    """f o phi, clearing the common factor (c^T z + d)^D."""
    if phi.m != f.m:
        raise DimensionError("automorphism acts on the wrong ball")
    m = f.m
    D = f.degree
    L = phi.lift
    subs = [Polynomial.linear(L[i, :m], L[i, m]) for i in range(m + 1)]
    num = [p.homogenize(D).substitute(subs) for p in f.numerator]
    den = f.denominator.homogenize(D).substitute(subs)
    return RationalProperMap(num, den)


def _postcompose(psi: GroupElement, f: RationalProperMap) -> RationalProperMap:
    if psi.m != f.M:
        raise DimensionError("automorphism acts on the wrong ball")
    L = psi.lift
    M = f.M
    comps = list(f.numerator) + [f.denominator]
    rows = []
    for i in range(M + 1):
        acc = Polynomial(f.m)
        for j in range(M + 1):
            if L[i, j] != 0:
                acc = acc + comps[j] * complex(L[i, j])
        rows.append(acc)
    return RationalProperMap(rows[:M], rows[M])


def compose(psi: GroupElement | None, f: RationalProperMap, phi: GroupElement | None) -> RationalProperMap:
    """psi o f o phi as a rational map (either automorphism may be None)."""
    out = f
    if phi is not None:
        out = _precompose(out, phi)
    if psi is not None:
        out = _postcompose(psi, out)
    return out.normalized()


def normalize_at_origin(f: RationalProperMap) -> tuple[RationalProperMap, GroupElement]:
    """(g o f, g) with g in Aut(B^M) carrying f(0) to 0."""
    p = f(np.zeros(f.m))
    g = transvection(p).inverse()
    return compose(g, f, None), g


@dataclass
class MapReport:
    q_min: float
    boundary_residual: float
    interior_max: float
    proper: bool

    def as_dict(self):
        return dict(self.__dict__)


def validate_map(
    f: RationalProperMap,
    n_boundary: int = 2000,
    n_interior: int = 2000,
    seed: int = 0,
    tol_proper: float | None = None,
    tol_denom: float | None = None,
) -> MapReport:
    """Numerical properness: q bounded away from 0 and ||f|| = 1 on the
    sampled sphere, ||f|| < 1 inside."""
    tol_proper = DEFAULT.tol_proper if tol_proper is None else tol_proper
    tol_denom = DEFAULT.tol_denom if tol_denom is None else tol_denom
    rng = np.random.default_rng(seed)
    xb = random_sphere_points(f.m, n_boundary, rng)
    zi = random_ball_points(f.m, n_interior, rng, r_max=1 - 1e-6)
    q_min = float(np.min(np.abs(f.denominator(xb)))) / f.denominator.max_abs_coeff()
    if q_min < tol_denom:
        return MapReport(q_min, np.inf, np.inf, False)
    resid = float(np.max(np.abs(np.linalg.norm(f(xb), axis=1) - 1)))
    inner = float(np.max(np.linalg.norm(f(zi), axis=1)))
    return MapReport(q_min, resid, inner, bool(resid <= tol_proper and inner < 1))


@dataclass
class SchwarzReport:
    passed: bool
    max_excess: float
    worst_sample: np.ndarray | None


def schwarz_check(f: RationalProperMap, samples, tol_origin: float = 1e-10, slack: float = 1e-12) -> SchwarzReport:
    """Check ||f(z)|| <= ||z|| on samples (requires f(0) = 0)."""
    if np.linalg.norm(f(np.zeros(f.m))) > tol_origin:
        raise PreconditionError("f(0) != 0; normalize by postcomposition first")
    z = np.atleast_2d(np.asarray(samples, dtype=complex))
    excess = np.linalg.norm(f(z), axis=1) - np.linalg.norm(z, axis=1)
    i = int(np.argmax(excess))
    ok = bool(excess[i] <= slack)
    return SchwarzReport(ok, float(excess[i]), None if ok else z[i])


@dataclass
class HolderEstimate:
    alpha: float
    C: float
    slopes: np.ndarray
    lemma_holds: bool
    lemma_max_ratio: float


def holder_estimate(
    f: RationalProperMap,
    n_pairs: int = 50,
    scale_range: tuple[float, float] = (1e-5, 1e-2),
    seed: int = 0,
    n_scales: int = 8,
    n_radial: int = 1000,
) -> HolderEstimate:
    """Empirical Hoelder exponent and constant on the closed ball.

    Pairs are (x, x') with x on the sphere and x' at distance delta, either
    along the sphere or radially inward; per pair the slope of
    log||f(x) - f(x')|| against log||x - x'|| is fitted, alpha is the smallest
    slope (capped at 1) and C the largest ratio ||f(x)-f(x')|| / delta^alpha.
    The radial bound 1 - ||f(z)|| <= C (1 - ||z||)^alpha is then checked
    for 1 - ||z|| in [scale_range[0], 1).
    """
    rng = np.random.default_rng(seed)
    m = f.m
    deltas = np.geomspace(scale_range[0], scale_range[1], n_scales)
    x = random_sphere_points(m, n_pairs, rng)
    try:
        fx = f(x)
    except DegenerateInputError as exc:
        raise PreconditionError("f is not evaluable on the boundary") from exc
    # tangent directions: random vectors with the normal component removed
    v = random_sphere_points(m, n_pairs, rng)
    v = v - np.real(np.sum(v * np.conj(x), axis=1))[:, None] * x
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    slopes, ratios_by_scale = [], []
    for kind in ("tangent", "radial"):
        dist = np.empty((n_pairs, n_scales))
        sep = np.empty((n_pairs, n_scales))
        for j, d in enumerate(deltas):
            if kind == "tangent":
                y = x * np.cos(d) + v * np.sin(d)
            else:
                y = (1 - d) * x
            dist[:, j] = np.linalg.norm(f(y) - fx, axis=1)
            sep[:, j] = np.linalg.norm(y - x, axis=1)
            ratios_by_scale.append((sep[:, j], dist[:, j]))
        logd = np.log(np.maximum(dist, 1e-300))
        logs = np.log(sep)
        # per-pair least-squares slope
        ls = logs - logs.mean(axis=1, keepdims=True)
        ld = logd - logd.mean(axis=1, keepdims=True)
        slopes.append(np.sum(ls * ld, axis=1) / np.sum(ls * ls, axis=1))
    slopes = np.concatenate(slopes)
    alpha = float(min(1.0, np.min(slopes)))
    # the constants were fitted down to scale_range[0]; test the bound there
    r = 1 - np.geomspace(scale_range[0], 1.0, n_radial, endpoint=False)
    xs = random_sphere_points(m, n_radial, rng)
    z = r[:, None] * xs
    # the pairs (z/||z||, z) used by the bound also enter the constant
    ratios_by_scale.append((1 - r, np.linalg.norm(f(xs) - f(z), axis=1)))
    C = max(float(np.max(dd / sep**alpha)) for sep, dd in ratios_by_scale)
    lhs = 1 - np.linalg.norm(f(z), axis=1)
    rhs = C * (1 - r) ** alpha
    ratio = float(np.max(lhs / rhs))
    return HolderEstimate(alpha, C, slopes, bool(ratio <= 1 + 1e-9), ratio)
