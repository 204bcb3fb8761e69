"""Finitely generated subgroups: word balls, limit sets, loxodromic
endpoints and a finite-degree Zariski density test."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .config import DEFAULT
from .core import GroupElement, apply_lift, form_matrix, homogenize
from .errors import (
    DegenerateInputError,
    DimensionError,
    InconclusiveError,
    LimitSetNotResolved,
    PreconditionError,
)
from .sampling import random_k
from .normal_forms import make_a
from .spectral import Kind, classify

MAX_LENGTH = 12


@dataclass(frozen=True)
class GeneratorSet:
    gens: tuple[GroupElement, ...]
    labels: tuple[str, ...] = ()
    seed: int = 0

    def __init__(self, gens, labels=None, seed: int = 0):
        gens = tuple(gens)
        if not gens:
            raise PreconditionError("at least one generator is required")
        m = gens[0].m
        for g in gens:
            if g.m != m:
                raise DimensionError("generators act on balls of different dimension")
            if g.membership_residual() > DEFAULT.tol_group * np.linalg.norm(g.lift) ** 2:
                raise PreconditionError("generator fails the U(m,1) membership check")
        if labels is None:
            labels = tuple("abcdefghijklmnopqrstuvwxyz"[i] for i in range(len(gens)))
        labels = tuple(labels)
        if len(labels) != len(gens):
            raise PreconditionError("one label per generator is required")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "seed", int(seed))

    @property
    def m(self) -> int:
        return self.gens[0].m

    def letters(self) -> list[int]:
        """Letter codes in canonical order: +i is generator i-1, -i its inverse."""
        out = []
        for i in range(len(self.gens)):
            out += [i + 1, -(i + 1)]
        return out

    def letter_lift(self, code: int) -> np.ndarray:
        g = self.gens[abs(code) - 1]
        return g.lift if code > 0 else g.inverse().lift

    def word_element(self, word) -> GroupElement:
        lift = np.eye(self.m + 1, dtype=complex)
        for code in word:
            lift = lift @ self.letter_lift(code)
        if not np.all(np.isfinite(lift)):
            raise DegenerateInputError("word element overflows double precision")
        return GroupElement._trusted(lift)

    def render(self, word) -> str:
        """Inverses are rendered in upper case; the empty word is 'e'."""
        if len(word) == 0:
            return "e"
        return "".join(
            self.labels[abs(c) - 1] if c > 0 else self.labels[abs(c) - 1].upper() for c in word
        )


def reduced_word_count(n_gens: int, length: int) -> int:
    if length == 0:
        return 1
    k = 2 * n_gens
    return 1 + sum(k * (k - 1) ** (j - 1) for j in range(1, length + 1))


def _check_budget(G: GeneratorSet, length: int, budget: int | None):
    if length < 0:
        raise PreconditionError("length must be non-negative")
    if length > MAX_LENGTH:
        raise PreconditionError(f"word length {length} exceeds the cost guard {MAX_LENGTH}")
    budget = DEFAULT.word_budget if budget is None else budget
    count = reduced_word_count(len(G.gens), length)
    if count > budget:
        raise PreconditionError(f"{count} reduced words exceed the budget of {budget}")


def iter_word_levels(G: GeneratorSet, length: int, budget: int | None = None):
    """Yield (words, lifts, log_scales) per word length, words as an int
    array (n, j).

    Words within a level are in lexicographic order of letter rank, where
    the ranks follow ``G.letters()``.  Lifts are rescaled to unit Frobenius
    norm; the J-normalized product equals exp(log_scale) * lift.
    """
    _check_budget(G, length, budget)
    n = G.m + 1
    letters = G.letters()
    letter_lifts = np.stack([G.letter_lift(c) for c in letters])
    words = np.zeros((1, 0), dtype=int)
    lifts = np.eye(n, dtype=complex)[None] / np.sqrt(n)
    logs = np.full(1, 0.5 * np.log(n))
    yield words, lifts, logs
    for _ in range(length):
        new_w, new_l = [], []
        last = words[:, -1] if words.shape[1] else np.zeros(len(words), dtype=int)
        # parent-major order keeps the level sorted lexicographically
        parent_idx, letter_idx = [], []
        for r, code in enumerate(letters):
            keep = np.nonzero(last != -code)[0]
            parent_idx.append(keep)
            letter_idx.append(np.full(len(keep), r))
        parent_idx = np.concatenate(parent_idx)
        letter_idx = np.concatenate(letter_idx)
        order = np.lexsort((letter_idx, parent_idx))
        parent_idx, letter_idx = parent_idx[order], letter_idx[order]
        codes = np.array(letters)[letter_idx]
        new_w = np.concatenate([words[parent_idx], codes[:, None]], axis=1)
        new_l = lifts[parent_idx] @ letter_lifts[letter_idx]
        nrm = np.linalg.norm(new_l, axis=(1, 2))
        new_l /= nrm[:, None, None]
        logs = logs[parent_idx] + np.log(nrm)
        words, lifts = new_w, new_l
        yield words, lifts, logs


def _orbit_points(lifts: np.ndarray, basepoint: np.ndarray) -> np.ndarray:
    v = lifts @ homogenize(basepoint)
    return v[:, :-1] / v[:, -1:]


def _dedup_indices(points: np.ndarray, tol: float) -> np.ndarray:
    """Greedy deterministic dedup: keep the first point of every tol-cluster."""
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    real = np.concatenate([points.real, points.imag], axis=1)
    tree = cKDTree(real)
    removed = np.zeros(len(points), dtype=bool)
    kept = []
    for i in range(len(points)):
        if removed[i]:
            continue
        kept.append(i)
        for j in tree.query_ball_point(real[i], tol):
            removed[j] = True
    return np.array(kept, dtype=int)


@dataclass
class Orbit:
    words: list[tuple[int, ...]]
    points: np.ndarray

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(zip(self.words, self.points))


def word_ball_orbit(
    G: GeneratorSet,
    length: int,
    basepoint=None,
    tol_dedup: float | None = None,
    budget: int | None = None,
) -> Orbit:
    """Images of ``basepoint`` under all reduced words of length <= ``length``,
    deduplicated by point proximity (shorter, then lexicographically smaller
    words win)."""
    tol_dedup = DEFAULT.tol_dedup if tol_dedup is None else tol_dedup
    base = np.zeros(G.m, dtype=complex) if basepoint is None else np.asarray(basepoint, dtype=complex)
    if base.shape != (G.m,):
        raise DimensionError(f"basepoint must have {G.m} coordinates")
    words, pts = [], []
    for w, lifts, _ in iter_word_levels(G, length, budget):
        words.extend(tuple(int(c) for c in row) for row in w)
        pts.append(_orbit_points(lifts, base))
    pts = np.concatenate(pts)
    keep = _dedup_indices(pts, tol_dedup)
    return Orbit([words[i] for i in keep], pts[keep])


@dataclass
class LimitSetSample:
    points: np.ndarray
    words: list[tuple[int, ...]]
    radius_cut: float

    def __len__(self):
        return len(self.words)


def limit_set(
    G: GeneratorSet,
    length: int,
    eps: float = 1e-3,
    tol_dedup: float | None = None,
    budget: int | None = None,
) -> LimitSetSample:
    """Orbit points of 0 with norm above 1 - eps, pushed radially to the sphere."""
    tol_dedup = DEFAULT.tol_dedup if tol_dedup is None else tol_dedup
    words, pts = [], []
    origin = np.zeros(G.m, dtype=complex)
    for w, lifts, _ in iter_word_levels(G, length, budget):
        p = _orbit_points(lifts, origin)
        sel = np.linalg.norm(p, axis=1) > 1 - eps
        words.extend(tuple(int(c) for c in row) for row in w[sel])
        pts.append(p[sel])
    pts = np.concatenate(pts)
    if len(pts) == 0:
        raise LimitSetNotResolved(
            f"no orbit point of 0 within {eps:g} of the boundary up to length {length}"
        )
    pts = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    keep = _dedup_indices(pts, tol_dedup)
    return LimitSetSample(pts[keep], [words[i] for i in keep], 1 - eps)


@dataclass
class FixedPointCloud:
    """Attracting/repelling fixed points of the loxodromic words of a ball."""

    words: list[tuple[int, ...]]
    x_plus: np.ndarray
    x_minus: np.ndarray
    lambda1: np.ndarray

    def all_points(self) -> np.ndarray:
        return np.concatenate([self.x_plus, self.x_minus])


def loxodromic_fixed_points(
    G: GeneratorSet, length: int, margin: float = 1e-6, budget: int | None = None
) -> FixedPointCloud:
    """Batched eigen-decomposition of every reduced word up to ``length``.

    A word counts as loxodromic when its determinant-normalized spectral
    radius exceeds 1 + margin.
    """
    J = form_matrix(G.m)
    words, xp, xm, lam = [], [], [], []
    for w, lifts, logs in iter_word_levels(G, length, budget):
        if w.shape[1] == 0:
            continue
        rows = np.arange(len(w))
        ev, vecs = np.linalg.eig(lifts)
        top = np.argmax(np.abs(ev), axis=1)
        lam1 = np.abs(ev[rows, top]) * np.exp(logs)
        sel = lam1 > 1 + margin
        if not np.any(sel):
            continue
        # the repelling point is the attracting point of the inverse J L^* J;
        # the bottom eigenvector of L itself is lost to rounding for long words
        inv = J @ np.conj(np.swapaxes(lifts[sel], 1, 2)) @ J
        ev_i, vecs_i = np.linalg.eig(inv)
        top_i = np.argmax(np.abs(ev_i), axis=1)
        vp = vecs[rows, :, top][sel]
        vm = vecs_i[np.arange(len(inv)), :, top_i]
        p = vp[:, :-1] / vp[:, -1:]
        q = vm[:, :-1] / vm[:, -1:]
        xp.append(p / np.linalg.norm(p, axis=1, keepdims=True))
        xm.append(q / np.linalg.norm(q, axis=1, keepdims=True))
        lam.append(lam1[sel])
        words.extend(tuple(int(c) for c in row) for row in w[sel])
    if not words:
        empty = np.zeros((0, G.m), dtype=complex)
        return FixedPointCloud([], empty, empty, np.zeros(0))
    return FixedPointCloud(words, np.concatenate(xp), np.concatenate(xm), np.concatenate(lam))


@dataclass
class PairApproximation:
    element: GroupElement
    word: tuple[int, ...]
    error: float
    x_plus: np.ndarray
    x_minus: np.ndarray


def loxodromic_pair_approx(
    G: GeneratorSet, x, y, length: int, tol: float | None = None, budget: int | None = None
) -> PairApproximation:
    """Loxodromic word whose (attracting, repelling) pair best matches (x, y).

    The reduced word ball of radius L contains every product g h^{-1} with
    |g|, |h| <= L/2, so minimizing over the ball covers the candidates
    gamma_n = g_n h_n^{-1} with g_n(0) -> x and h_n(0) -> y.  The error
    ||x_plus - x|| + ||x_minus - y|| is therefore non-increasing in L.
    """
    tol = DEFAULT.tol_bdry if tol is None else tol
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.linalg.norm(x - y) <= tol:
        raise PreconditionError("x and y must be distinct")
    cloud = loxodromic_fixed_points(G, length, budget=budget)
    if not cloud.words:
        raise InconclusiveError("no loxodromic word in the ball", best=None)
    err = np.linalg.norm(cloud.x_plus - x, axis=1) + np.linalg.norm(cloud.x_minus - y, axis=1)
    i = int(np.argmin(err))
    word = cloud.words[i]
    g = G.word_element(word)
    data = classify(g)
    if data.kind != Kind.LOXODROMIC:
        raise InconclusiveError("best candidate is not loxodromic at tol_class", best=g)
    e = float(np.linalg.norm(data.fixed_plus - x) + np.linalg.norm(data.fixed_minus - y))
    return PairApproximation(g, word, e, data.fixed_plus, data.fixed_minus)


# ---------------------------------------------------------------------------
# Zariski density at finite degree


class ZariskiVerdict(str, enum.Enum):
    DENSE = "DenseAtDegree"
    NOT_DENSE = "NotDense"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


@dataclass
class ZariskiReport:
    degree: int
    null_dim_group: int
    null_dim_ambient: int
    verdict: ZariskiVerdict
    gap_group: float
    gap_ambient: float
    n_samples: int
    witness: np.ndarray | None = None
    monomials: list[tuple[int, ...]] = field(default_factory=list)
    column_scale: np.ndarray | None = None


def real_coordinates(lifts: np.ndarray) -> np.ndarray:
    """(n, 2 (m+1)^2) array of real and imaginary parts of the entries."""
    lifts = np.asarray(lifts)
    flat = lifts.reshape(lifts.shape[0], -1)
    return np.concatenate([flat.real, flat.imag], axis=1)


def monomial_exponents(n_vars: int, degree: int) -> list[tuple[int, ...]]:
    """All monomials of total degree <= degree as sorted variable-index tuples."""
    out = []
    for d in range(degree + 1):
        out.extend(itertools.combinations_with_replacement(range(n_vars), d))
    return out


def monomial_features(lifts: np.ndarray, monomials) -> np.ndarray:
    X = real_coordinates(lifts)
    cols = np.empty((X.shape[0], len(monomials)))
    for j, mono in enumerate(monomials):
        col = np.ones(X.shape[0])
        for v in mono:
            col = col * X[:, v]
        cols[:, j] = col
    return cols


def _j_normalize(lifts: np.ndarray) -> np.ndarray:
    n = lifts.shape[-1]
    det = np.linalg.det(lifts)
    return lifts / (np.abs(det) ** (1.0 / n))[:, None, None]


def sample_group_lifts(
    G: GeneratorSet, n: int, rng: np.random.Generator, max_length: int = 6
) -> np.ndarray:
    """Random reduced words with uniformly random unit phases on the lift."""
    letters = G.letters()
    size = G.m + 1
    out = np.empty((n, size, size), dtype=complex)
    for s in range(n):
        L = int(rng.integers(0, max_length + 1))
        lift = np.eye(size, dtype=complex)
        prev = 0
        for _ in range(L):
            choices = [c for c in letters if c != -prev]
            c = choices[int(rng.integers(len(choices)))]
            lift = lift @ G.letter_lift(c)
            prev = c
        out[s] = lift
    out = _j_normalize(out)
    phases = np.exp(2j * np.pi * rng.random(n))
    return out * phases[:, None, None]


def sample_ambient_lifts(m: int, n: int, rng: np.random.Generator, t_max: float = 2.0) -> np.ndarray:
    """k1 a_t k2 with Haar k_i, t uniform on [0, t_max] and random phases."""
    out = np.empty((n, m + 1, m + 1), dtype=complex)
    for s in range(n):
        g = random_k(m, rng) @ make_a(rng.uniform(0, t_max), m) @ random_k(m, rng)
        out[s] = g.lift * np.exp(2j * np.pi * rng.random())
    return out


def _row_normalize(V: np.ndarray) -> np.ndarray:
    # row scaling leaves the right nullspace unchanged
    nr = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.where(nr > 0, nr, 1.0)


def _nullity(V: np.ndarray, tol_rank: float):
    """(nullity, gap, right singular vectors) with relative threshold tol_rank."""
    _, s, vh = np.linalg.svd(V, full_matrices=True)
    s_full = np.zeros(V.shape[1])
    s_full[: len(s)] = s
    rank = int(np.sum(s_full > tol_rank * s_full[0]))
    nullity = V.shape[1] - rank
    if 0 < rank < V.shape[1]:
        gap = s_full[rank - 1] / max(s_full[rank], np.finfo(float).tiny)
    else:
        gap = np.inf
    return nullity, float(gap), vh


def zariski_test(
    G: GeneratorSet,
    degree: int = 2,
    n_samples: int | None = None,
    seed: int | None = None,
    tol_rank: float | None = None,
    max_word_length: int = 6,
) -> ZariskiReport:
    """Compare the polynomial relations of degree <= ``degree`` satisfied by
    random lifts of the group with those satisfied by random U(m,1) samples.

    Monomials are in the 2(m+1)^2 real coordinates of the lift.  Feature rows
    are normalized to unit length and columns share one scaling computed on
    both sample sets, so both nullspaces live in the same coordinates.
    """
    tol_rank = DEFAULT.tol_rank if tol_rank is None else tol_rank
    seed = G.seed if seed is None else seed
    if not 1 <= degree <= 4:
        raise PreconditionError("degree must be between 1 and 4")
    n_vars = 2 * (G.m + 1) ** 2
    monomials = monomial_exponents(n_vars, degree)
    n_samples = 3 * len(monomials) if n_samples is None else n_samples
    if n_samples < 3 * len(monomials):
        raise PreconditionError(
            f"n_samples={n_samples} is below 3x the monomial count ({3 * len(monomials)})"
        )
    rng = np.random.default_rng(seed)
    Vg = _row_normalize(monomial_features(sample_group_lifts(G, n_samples, rng, max_word_length), monomials))
    Va = _row_normalize(monomial_features(sample_ambient_lifts(G.m, n_samples, rng), monomials))
    scale = np.linalg.norm(np.concatenate([Vg, Va]), axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    Vg = _row_normalize(Vg / scale)
    Va = _row_normalize(Va / scale)
    ng, gap_g, vh_g = _nullity(Vg, tol_rank)
    na, gap_a, vh_a = _nullity(Va, tol_rank)
    report = ZariskiReport(degree, ng, na, ZariskiVerdict.INCONCLUSIVE, gap_g, gap_a, n_samples,
                           monomials=monomials, column_scale=scale)
    if gap_g < 10 or gap_a < 10:
        return report
    if ng == na:
        report.verdict = ZariskiVerdict.DENSE
        return report
    if ng < na:
        # the group cannot satisfy fewer relations than its ambient group
        return report
    Ng = vh_g[len(vh_g) - ng:].T
    Na = vh_a[len(vh_a) - na:].T
    # direction of the group nullspace furthest from the ambient nullspace
    resid = Ng - Na @ (Na.T @ Ng) if na else Ng
    u, s, vt = np.linalg.svd(resid, full_matrices=False)
    w = Ng @ vt[0]
    report.witness = w / np.linalg.norm(w)
    report.verdict = ZariskiVerdict.NOT_DENSE
    return report


def evaluate_witness(report: ZariskiReport, lifts: np.ndarray) -> np.ndarray:
    """|p(X)| for the witness p, on row-normalized scaled features, so values
    are comparable across samples of very different size."""
    if report.witness is None:
        raise PreconditionError("report carries no witness")
    V = _row_normalize(monomial_features(lifts, report.monomials)) / report.column_scale
    V = _row_normalize(V)
    return np.abs(V @ report.witness)
