"""Orbits, contraction rates and North-South convergence."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .core import GroupElement, apply_lift, homogenize, point_on_line
from .errors import DegenerateInputError, NoEscapeError, NotLoxodromicError, PreconditionError
from .spectral import Kind, classify, power_lift


def iterate(g: GroupElement, z, n: int, tol_denom: float | None = None):
    """g**n applied to z, with the power formed by renormalized repeated squaring."""
    if n < 0:
        raise ValueError("n must be non-negative")
    tol_denom = DEFAULT.tol_denom if tol_denom is None else tol_denom
    P, _ = power_lift(g.lift, n)
    return apply_lift(P, z, tol_denom)


@dataclass(frozen=True)
class RateEstimate:
    samples: list[tuple[int, float]]
    slope: float
    predicted: float
    on_axis: bool
    fit_range: tuple[int, int] = (0, 0)

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.predicted) / abs(self.predicted)


def _distance_to_attractor(g: GroupElement, z: np.ndarray, ns, on_axis: bool) -> np.ndarray:
    """||g^n(z) - x_plus|| for each n, evaluated without cancellation.

    With the eigen-expansion G^n (z,1) = sum_i gamma_i lambda_i^n v_i and u
    the part off the dominant direction, the difference of dehomogenized
    points is (u_top v_last - v_top u_last) / (U_last v_last), which never
    subtracts nearly equal numbers.
    """
    ev, vecs = np.linalg.eig(g.lift)
    order = np.argsort(-np.abs(ev))
    ev, vecs = ev[order], vecs[:, order]
    gamma = np.linalg.solve(vecs, homogenize(z))
    if on_axis:
        # on the axis the homogeneous point lies in span(v_plus, v_minus)
        gamma[1:-1] = 0
    vp = vecs[:, 0]
    ratios = ev[1:] / ev[0]
    out = []
    for n in ns:
        rest = vecs[:, 1:] @ (gamma[1:] * ratios**n)
        full_last = gamma[0] * vp[-1] + rest[-1]
        num = rest[:-1] * vp[-1] - vp[:-1] * rest[-1]
        out.append(np.linalg.norm(num) / abs(full_last * vp[-1]))
    return np.array(out)


def contraction_rate(
    g: GroupElement,
    z,
    n_max: int = 40,
    tol_line: float | None = None,
    tol_bdry: float | None = None,
) -> RateEstimate:
    """Least-squares slope of log||g^n(z) - x_plus|| over n in [n_max/2, n_max]."""
    tol_line = DEFAULT.tol_line if tol_line is None else tol_line
    tol_bdry = DEFAULT.tol_bdry if tol_bdry is None else tol_bdry
    z = np.asarray(z, dtype=complex)
    data = classify(g)
    if data.kind != Kind.LOXODROMIC:
        raise NotLoxodromicError(f"element is {data.kind.value}, not loxodromic")
    for x in (data.fixed_plus, data.fixed_minus):
        if np.linalg.norm(z - x) <= tol_bdry:
            raise PreconditionError("z coincides with a fixed point of g")
    on_axis = point_on_line(data.axis, z, tol_line)
    ns = np.arange(1, n_max + 1)
    dist = _distance_to_attractor(g, z, ns, on_axis)
    lo = max(1, n_max // 2)
    fit = ns >= lo
    if np.any(dist[fit] < 1e-300) or not np.all(np.isfinite(dist[fit])):
        raise DegenerateInputError("distance underflows before n_max/2; use a smaller n_max")
    logd = np.log(np.maximum(dist, 1e-320))
    slope = float(np.polyfit(ns[fit], logd[fit], 1)[0])
    log_lam = np.log(data.lambda1)
    predicted = float(-2 * log_lam if on_axis else -log_lam)
    samples = [(int(n), float(v)) for n, v in zip(ns, logd)]
    return RateEstimate(samples, slope, predicted, on_axis, (lo, n_max))


@dataclass
class NorthSouthReport:
    attractor: np.ndarray
    repeller: np.ndarray
    max_distance: list[float]
    n_points: int
    excluded: int
    decreasing: bool = field(default=False)

    @property
    def final(self) -> float:
        return self.max_distance[-1]


def verify_north_south(
    gs,
    z_samples,
    exclusion: float = 0.1,
    escape_tol: float = 1e-3,
    attractor=None,
    repeller=None,
) -> NorthSouthReport:
    """Track max_z ||g_n(z) - x|| over samples kept ``exclusion`` away from y.

    x and y default to the normalized images of 0 under the last g_n and
    its inverse.
    """
    gs = list(gs)
    z_samples = np.atleast_2d(np.asarray(z_samples, dtype=complex))
    m = gs[0].m
    origin = np.zeros(m)
    p = gs[-1](origin)
    q = gs[-1].inverse()(origin)
    if np.linalg.norm(p) < 1 - escape_tol or np.linalg.norm(q) < 1 - escape_tol:
        raise NoEscapeError("orbit of 0 does not approach the boundary (no escape to infinity)")
    x = p / np.linalg.norm(p) if attractor is None else np.asarray(attractor, dtype=complex)
    y = q / np.linalg.norm(q) if repeller is None else np.asarray(repeller, dtype=complex)
    keep = np.linalg.norm(z_samples - y, axis=1) >= exclusion
    pts = z_samples[keep]
    dists = [float(np.max(np.linalg.norm(g(pts) - x, axis=1))) for g in gs]
    # trend: a running maximum of later values never exceeds earlier ones by much
    tail = np.maximum.accumulate(np.array(dists)[::-1])[::-1]
    decreasing = bool(dists[-1] < dists[0] and np.all(np.diff(tail) <= 1e-12))
    return NorthSouthReport(x, y, dists, int(keep.sum()), int((~keep).sum()), decreasing)
