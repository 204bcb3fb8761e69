"""Spectral invariants lambda_1, sigma_1 and the elliptic/parabolic/loxodromic split."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .core import AffineLine, GroupElement, act, dehomogenize, form_matrix, line_through
from .errors import BorderlineError, ConvergenceError, NotLoxodromicError


class Kind(str, enum.Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    LOXODROMIC = "Loxodromic"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SpectralData:
    lambda1: float
    sigma1: float
    kind: Kind
    fixed_plus: np.ndarray | None = None
    fixed_minus: np.ndarray | None = None
    interior_fixed: np.ndarray | None = None
    axis: AffineLine | None = None


def sigma1(g: GroupElement) -> float:
    """Largest singular value of the U(m,1) lift."""
    return float(np.linalg.norm(g.lift, 2))


def power_lift(lift: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """(P, s) with lift**n = exp(s) * P and ||P||_F = sqrt(m+1).

    Repeated squaring; every product is rescaled so entries never overflow.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    size = lift.shape[0]
    target = np.sqrt(size)
    result = np.eye(size, dtype=complex)
    log_result = 0.0
    sq = np.array(lift, dtype=complex)
    log_sq = 0.0
    while n:
        if n & 1:
            result = result @ sq
            nr = np.linalg.norm(result) / target
            result /= nr
            log_result += log_sq + np.log(nr)
        n >>= 1
        if n:
            sq = sq @ sq
            log_sq *= 2
            ns = np.linalg.norm(sq) / target
            sq /= ns
            log_sq += np.log(ns)
    return result, log_result


def log_sigma1_power(g: GroupElement, n: int) -> float:
    """log sigma_1(g**n), safe for n*t far beyond the overflow threshold."""
    P, s = power_lift(g.lift, n)
    return s + float(np.log(np.linalg.norm(P, 2)))


def spectral_radius_sequence(g: GroupElement, ns) -> np.ndarray:
    """sigma_1(g**n)**(1/n) for each n in ns."""
    return np.array([np.exp(log_sigma1_power(g, n) / n) for n in ns])


def dominant_eigenpair(matrix: np.ndarray, max_iter: int = 60, tol: float = 1e-13):
    """Dominant eigenpair by power iteration on renormalized repeated squares.

    Step k applies matrix**(2**k) (kept at unit Frobenius norm) to a fixed
    start vector, so the error contracts like |lambda_2/lambda_1|**(2**k).
    Returns (eigenvalue, unit eigenvector, converged).
    """
    matrix = np.asarray(matrix, dtype=complex)
    n = matrix.shape[0]
    v0 = np.ones(n, dtype=complex) + 1j * np.arange(n) / (n + 1.0)
    scale = np.linalg.norm(matrix, 2)
    P = matrix / np.linalg.norm(matrix)
    prev = None
    for _ in range(max_iter):
        v = P @ v0
        nv = np.linalg.norm(v)
        if nv == 0:
            break
        v /= nv
        w = matrix @ v
        lam = np.vdot(v, w)
        res = np.linalg.norm(w - lam * v) / scale
        if res <= tol and prev is not None and abs(lam - prev) <= tol * scale:
            return lam, v, True
        prev = lam
        P = P @ P
        nP = np.linalg.norm(P)
        if nP == 0 or not np.isfinite(nP):
            break
        P /= nP
    return prev, v if prev is not None else v0, False


def eigen_clusters(matrix: np.ndarray, tol_cluster: float) -> list[tuple[complex, np.ndarray]]:
    """Group eigenvalues by single linkage; return (cluster mean, members).

    The mean of a cluster produced by perturbing a Jordan block is accurate
    to rounding, unlike its individual members.
    """
    ev = np.linalg.eigvals(matrix)
    n = len(ev)
    label = list(range(n))

    def root(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(ev[i] - ev[j]) <= tol_cluster * max(1.0, abs(ev[i])):
                label[root(i)] = root(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(root(i), []).append(i)
    out = [(complex(np.mean(ev[idx])), ev[idx]) for idx in groups.values()]
    out.sort(key=lambda c: -abs(c[0]))
    return out


def effective_cluster_tol(g: GroupElement, tol_cluster: float) -> float:
    """Cluster radius widened to the splitting a rounding-perturbed Jordan
    block of size m+1 can show: (eps * cond)**(1/(m+1)), cond = sigma_1**2."""
    cond = np.linalg.norm(g.lift, 2) ** 2
    split = (np.finfo(float).eps * cond) ** (1.0 / (g.m + 1))
    return max(tol_cluster, 10.0 * split)


def lambda1(
    g: GroupElement,
    method: str = "auto",
    tol_cluster: float | None = None,
    max_iter: int = 60,
) -> float:
    """Spectral radius of the U(m,1) lift (always >= 1 up to rounding).

    ``method="auto"`` uses power iteration when the dominant eigenvalue is
    simple and isolated, and otherwise the largest modulus among cluster
    means of the full spectrum.  ``method="power"`` raises ConvergenceError
    instead of falling back.
    """
    tol_cluster = effective_cluster_tol(g, DEFAULT.tol_cluster if tol_cluster is None else tol_cluster)
    lam, _, ok = dominant_eigenpair(g.lift, max_iter=max_iter)
    if ok:
        clusters = eigen_clusters(g.lift, tol_cluster)
        top = [c for c in clusters if abs(c[0] - lam) <= tol_cluster * abs(lam)]
        if len(top) == 1 and len(top[0][1]) == 1:
            return max(1.0, float(abs(lam)))
    if method == "power":
        seq = spectral_radius_sequence(g, [2**k for k in range(0, 21, 4)])
        raise ConvergenceError(
            "power iteration did not isolate a dominant eigenvalue",
            bracket=(1.0, float(seq[-1])),
        )
    clusters = eigen_clusters(g.lift, tol_cluster)
    return max(1.0, float(abs(clusters[0][0])))


def _boundary_from(v: np.ndarray) -> np.ndarray:
    x = dehomogenize(v)
    return x / np.linalg.norm(x)


def _cluster_kernels(g: GroupElement, tol_cluster: float):
    """Yield (cluster mean, orthonormal basis of the approximate eigenspace)."""
    lift = g.lift
    thr = 1e-9 * np.linalg.norm(lift, 2)
    for mean, _members in eigen_clusters(lift, tol_cluster):
        _, s, vh = np.linalg.svd(lift - mean * np.eye(lift.shape[0]))
        basis = vh[s <= thr].conj().T
        if basis.shape[1] == 0:
            basis = vh[-1:].conj().T
        yield mean, basis


def classify(g: GroupElement, tol_class: float | None = None, tol_cluster: float | None = None) -> SpectralData:
    tol_class = DEFAULT.tol_class if tol_class is None else tol_class
    tol_cluster = DEFAULT.tol_cluster if tol_cluster is None else tol_cluster
    lam = lambda1(g, tol_cluster=tol_cluster)
    tol_cluster = effective_cluster_tol(g, tol_cluster)
    sig = sigma1(g)
    lam = min(lam, sig)  # sigma_1 >= lambda_1 exactly; drop last-ulp rounding
    if lam > 1 + tol_class:
        xp, xm = _loxodromic_fixed_points(g)
        return SpectralData(lam, sig, Kind.LOXODROMIC, fixed_plus=xp, fixed_minus=xm, axis=line_through(xp, xm))
    J = form_matrix(g.m)
    null_vec = None
    for mean, basis in _cluster_kernels(g, tol_cluster):
        if abs(abs(mean) - 1) > tol_cluster:
            continue
        gram = basis.conj().T @ J @ basis
        w, u = np.linalg.eigh((gram + gram.conj().T) / 2)
        if w[0] < -tol_class:
            v = basis @ u[:, 0]
            return SpectralData(lam, sig, Kind.ELLIPTIC, interior_fixed=dehomogenize(v))
        if abs(w[0]) <= max(tol_class, 1e-6) and null_vec is None:
            null_vec = basis @ u[:, 0]
    if null_vec is not None:
        return SpectralData(lam, sig, Kind.PARABOLIC, fixed_plus=_boundary_from(null_vec))
    raise BorderlineError(
        f"lambda_1 = {lam!r} is within tol_class of 1 and no eigenvector decides the type"
    )


def _loxodromic_fixed_points(g: GroupElement):
    _, vp, ok_p = dominant_eigenpair(g.lift)
    _, vm, ok_m = dominant_eigenpair(g.inverse().lift)
    if not (ok_p and ok_m):
        # slow convergence (t tiny): take eigenvectors of the extreme moduli
        ev, vecs = np.linalg.eig(g.lift)
        order = np.argsort(np.abs(ev))
        vp, vm = vecs[:, order[-1]], vecs[:, order[0]]
    return _boundary_from(vp), _boundary_from(vm)


def fixed_points_loxodromic(g: GroupElement) -> tuple[np.ndarray, np.ndarray]:
    """(x_plus, x_minus): attracting and repelling fixed points."""
    data = classify(g)
    if data.kind != Kind.LOXODROMIC:
        raise NotLoxodromicError(f"element is {data.kind.value}, not loxodromic")
    return data.fixed_plus, data.fixed_minus


def norm_at_origin(g: GroupElement) -> float:
    """|g(0)| from sigma_1 alone: (s^2 - 1)/(s^2 + 1)."""
    s2 = sigma1(g) ** 2
    return (s2 - 1) / (s2 + 1)


def origin_norm_direct(g: GroupElement) -> float:
    return float(np.linalg.norm(act(g, np.zeros(g.m))))
