"""End-to-end numerical check that a symmetric rational proper map is
equivalent to the trivial embedding z -> (z, 0)."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from ..config import DEFAULT, Config
from ..core import GroupElement
from ..errors import ChballError
from ..normal_forms import make_k, unitary_completion
from ..sampling import random_ball_points, random_sphere_points
from ..spectral import Kind, classify
from ..subgroups import GeneratorSet, ZariskiVerdict, iter_word_levels, zariski_test
from .detector import z_x_membership
from .ftag import Branch, ftag_fit
from .rational import RationalProperMap, compose, holder_estimate, normalize_at_origin
from .symmetry import SymmetryPair, check_loxo_pair, verify_symmetry_pair


class Verdict(str, enum.Enum):
    EQUIVALENT = "Equivalent"
    NOT_EQUIVALENT = "NotEquivalent"
    PRECONDITION_FAILED = "PreconditionFailed"

    def __str__(self):
        return self.value


@dataclass
class RigidityResult:
    """Outcome of the pipeline.

    On success ``phi1`` (an automorphism of B^m, applied first) and ``phi2``
    (an automorphism of B^M, applied last) satisfy phi2(f(phi1(z))) = (z, 0)
    up to ``residual``.  Otherwise ``certificate`` names the failing stage
    and its data.
    """

    verdict: Verdict
    stage: str
    residual: float | None = None
    phi1: GroupElement | None = None
    phi2: GroupElement | None = None
    certificate: dict = field(default_factory=dict)
    assumptions: list[str] = field(default_factory=list)
    log: list[dict] = field(default_factory=list)


def _pair_words(pairs, length: int):
    """Word-ball elements (phi_w, psi_w) for the group generated by the pairs."""
    Gphi = GeneratorSet([p.phi for p in pairs])
    Gpsi = GeneratorSet([p.psi for p in pairs])
    out = []
    for (w, lp, sp), (_, lq, sq) in zip(iter_word_levels(Gphi, length), iter_word_levels(Gpsi, length)):
        for i in range(len(w)):
            if w.shape[1]:
                out.append((tuple(int(c) for c in w[i]), GroupElement._trusted(np.exp(sp[i]) * lp[i]),
                            GroupElement._trusted(np.exp(sq[i]) * lq[i])))
    return Gphi, out


def _span_rotation(f: RationalProperMap, n: int, rng) -> tuple[int, GroupElement]:
    """(r, k) with k in K(M) rotating the linear span of f(B^m) (f(0) = 0)
    onto C^r x {0}."""
    z = random_ball_points(f.m, n, rng, r_max=0.9)
    W = f(z)
    u, s, _ = np.linalg.svd(W.T, full_matrices=True)
    r = int(np.sum(s > 1e-9 * s[0]))
    # u is unitary with the span first; k = u^* sends it onto the first r axes
    return r, make_k(u.conj().T)


def rigidity_verify(
    f: RationalProperMap,
    pairs,
    config: Config = DEFAULT,
    n_lines: int = 10,
    n_check: int = 1000,
    skip_zariski: bool = False,
) -> RigidityResult:
    """Run the rigidity argument numerically.

    Stages: symmetry pairs verified; Zariski density of the phi's at degree
    2; f(0) = 0 by postcomposition; loxodromic pair checks over the word
    ball; Z_x membership on random boundary pairs; span reduction; FTAG
    fits per coordinate subset; final automorphism fit and residual.
    """
    pairs = [p if isinstance(p, SymmetryPair) else SymmetryPair(*p) for p in pairs]
    rng = np.random.default_rng(config.seed)
    log = []
    assumptions = ["Hoelder exponent alpha > 1/2 is assumed, not certified"]

    def fail(verdict, stage, **cert):
        return RigidityResult(verdict, stage, certificate=cert, assumptions=assumptions, log=log)

    # (0) preconditions
    for i, p in enumerate(pairs):
        res = verify_symmetry_pair(f, p.phi, p.psi, config.n_samples, config.seed)
        log.append({"stage": "symmetry", "pair": i, "residual": res})
        if res > config.tol_sym:
            return fail(Verdict.PRECONDITION_FAILED, "symmetry", pair=i, residual=res)
    if not skip_zariski:
        G = GeneratorSet([p.phi for p in pairs], seed=config.seed)
        rep = zariski_test(G, 2, seed=config.seed, tol_rank=config.tol_rank)
        log.append({"stage": "zariski", "verdict": rep.verdict.value,
                    "null_dim_group": rep.null_dim_group, "null_dim_ambient": rep.null_dim_ambient})
        if rep.verdict != ZariskiVerdict.DENSE:
            cert = {"zariski_verdict": rep.verdict.value, "null_dim_group": rep.null_dim_group,
                    "null_dim_ambient": rep.null_dim_ambient}
            if rep.witness is not None:
                cert["witness"] = rep.witness
                cert["monomials"] = rep.monomials
            return fail(Verdict.PRECONDITION_FAILED, "zariski", **cert)
    try:
        hold = holder_estimate(f, seed=config.seed)
        assumptions.append(f"empirical alpha_hat = {hold.alpha:.6f}, C_hat = {hold.C:.6f}")
        alpha = hold.alpha
    except ChballError:
        alpha = None

    # (1) normalize f(0) = 0
    f0, t0 = normalize_at_origin(f)

    # (2) loxodromic pairs in the word ball
    _, words = _pair_words(pairs, max(1, config.word_length))
    for word, phi_w, psi_w in words:
        if classify(phi_w).kind != Kind.LOXODROMIC:
            continue
        rep = check_loxo_pair(f, SymmetryPair(phi_w, psi_w), alpha=alpha, tol_line=config.tol_line)
        log.append({"stage": "loxo_pair", "word": list(word), "passed": rep.passed,
                    "axis_residual": rep.axis_residual})
        if not rep.passed:
            return fail(Verdict.NOT_EQUIVALENT, "loxo_pair", word=list(word), report=rep.as_dict())

    # (3) lines through random boundary pairs map into lines
    xs = random_sphere_points(f.m, n_lines, rng)
    ys = random_sphere_points(f.m, n_lines, rng)
    for x, y in zip(xs, ys):
        rep = z_x_membership(f, x, y, tol=config.tol_line, seed=config.seed)
        if not rep.member:
            return fail(Verdict.NOT_EQUIVALENT, "z_x", x=x, y=y, report=rep.as_dict())
    log.append({"stage": "z_x", "lines": n_lines, "passed": True})

    # (4) span reduction and FTAG per coordinate subset
    r, k = _span_rotation(f0, 4 * (f.M + 1) ** 2, rng)
    log.append({"stage": "span", "dimension": r})
    if r != f.m:
        return fail(Verdict.NOT_EQUIVALENT, "span", dimension=r, expected=f.m)
    f1 = compose(k, f0, None)
    z = random_ball_points(f.m, max(200, 2 * (f.m + 1) ** 2), rng, r_max=0.95)
    W = f1(z)
    tail = float(np.max(np.abs(W[:, f.m:]))) if f.M > f.m else 0.0
    if tail > config.tol_ftag:
        return fail(Verdict.NOT_EQUIVALENT, "span", tail=tail)
    fit = None
    for J in itertools.combinations(range(r), f.m):
        try:
            fj = ftag_fit(z, W[:, list(J)], tol=config.tol_ftag)
        except ChballError as exc:
            return fail(Verdict.NOT_EQUIVALENT, "ftag", subset=list(J), error=str(exc),
                        residual=getattr(exc, "residual", None))
        log.append({"stage": "ftag", "subset": list(J), "branch": fj.branch.value, "residual": fj.residual})
        if fj.branch != Branch.HOLOMORPHIC:
            return fail(Verdict.NOT_EQUIVALENT, "ftag", subset=list(J), branch=fj.branch.value)
        fit = fj

    # (5) the reduced map is an automorphism of B^m: invert it
    try:
        g = GroupElement(fit.g, tol=1e-6)
    except ChballError as exc:
        return fail(Verdict.NOT_EQUIVALENT, "automorphism", error=str(exc))
    phi1 = g.inverse()
    phi2 = k @ t0
    zc = random_ball_points(f.m, n_check, rng, r_max=1.0)
    target = np.concatenate([zc, np.zeros((n_check, f.M - f.m))], axis=1)
    residual = float(np.max(np.linalg.norm(phi2(f(phi1(zc))) - target, axis=1)))
    log.append({"stage": "final", "residual": residual})
    if residual > 1e-7:
        return fail(Verdict.NOT_EQUIVALENT, "final", residual=residual)
    return RigidityResult(Verdict.EQUIVALENT, "final", residual, phi1, phi2,
                          assumptions=assumptions, log=log)
