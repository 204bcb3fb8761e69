"""Acceptance criteria, one test per criterion.

Each test records its measured quantity before asserting, and the
conftest summary hook prints one PASS/FAIL line per criterion.
"""

import numpy as np
from scipy.spatial import cKDTree

from chball.core import GroupElement, act, point_on_line
from chball.dynamics import contraction_rate, verify_north_south
from chball.maps.detector import z_x_membership
from chball.maps.ftag import Branch, ftag_fit
from chball.maps.rational import quadratic_map, quadratic_symmetry, trivial_embedding
from chball.maps.rigidity import Verdict, rigidity_verify
from chball.maps.symmetry import SymmetryPair, check_loxo_pair
from chball.errors import NoFractionalLinearModel
from chball.maps.polynomial import Polynomial
from chball.normal_forms import kak, loxodromic_normal_form, make_a, make_k, make_m
from chball.sampling import (
    haar_unitary,
    random_ball_points,
    random_element,
    random_k,
    random_loxodromic,
    random_sphere_points,
)
from chball.siegel import RescalingProblem, cayley, cayley_inv, flow_conjugacy_residual
from chball.spectral import Kind, classify, log_sigma1_power, sigma1
from chball.subgroups import (
    GeneratorSet,
    ZariskiVerdict,
    evaluate_witness,
    limit_set,
    loxodromic_fixed_points,
    sample_group_lifts,
    zariski_test,
)

from conftest import conjugated_trivial_family, record, schottky_pair


def test_c01_origin_norm_formula():
    rng = np.random.default_rng(101)
    err = 0.0
    for i in range(1000):
        g = random_element(2 + i % 2, rng)
        s = sigma1(g)
        direct = np.linalg.norm(act(g, np.zeros(g.m)))
        err = max(err, abs(direct - (s**2 - 1) / (s**2 + 1)))
    assert record(1, "origin norm from sigma1", err <= 1e-10, f"max abs error {err:.2e} (tol 1e-10)")


def test_c02_spectral_radius_formula():
    rng = np.random.default_rng(102)
    errs = []
    for i in range(100):
        g, _, _, t = random_loxodromic(2 + i % 2, rng)
        est = np.exp(log_sigma1_power(g, 16) / 16)
        errs.append(abs(est - np.exp(t)) / np.exp(t))
    worst = max(errs)
    n_ok = sum(e <= 1e-4 for e in errs)
    assert record(2, "sigma1(g^16)^(1/16) vs lambda1", worst <= 1e-4,
                  f"max rel error {worst:.2e}, {n_ok}/100 within 1e-4")


def test_c03_contraction_rates():
    rng = np.random.default_rng(103)
    worst = {True: 0.0, False: 0.0}
    for i in range(20):
        m = 2 + i % 2
        g, h, _, _ = random_loxodromic(m, rng)
        axis = classify(g).axis
        on = act(h, np.r_[rng.uniform(-0.8, 0.8), np.zeros(m - 1)])
        off = random_ball_points(m, 1, rng, r_max=0.9)[0]
        assert point_on_line(axis, on) and not point_on_line(axis, off)
        for z in (on, off):
            est = contraction_rate(g, z, n_max=40)
            worst[est.on_axis] = max(worst[est.on_axis], est.relative_error)
    ok = max(worst.values()) <= 0.02
    assert record(3, "contraction rate slopes", ok,
                  f"max rel error on-axis {worst[True]:.2e}, off-axis {worst[False]:.2e} (tol 2e-2)")


def test_c04_kak():
    rng = np.random.default_rng(104)
    rec = tgap = 0.0
    for i in range(10_000):
        g = random_element(2 + i % 2, rng)
        f = kak(g)
        rec = max(rec, f.residual(g))
        tgap = max(tgap, abs(f.t - np.arctanh(np.linalg.norm(act(g, np.zeros(g.m))))))
    ok = rec <= 1e-9 and tgap <= 1e-12
    assert record(4, "KAK round trip", ok, f"reconstruction {rec:.2e} (tol 1e-9), t gap {tgap:.2e} (tol 1e-12)")


def test_c05_loxodromic_normal_form():
    rng = np.random.default_rng(105)
    rec = lam = 0.0
    for i in range(200):
        g, _, _, t = random_loxodromic(2 + i % 2, rng)
        nf = loxodromic_normal_form(g)
        rec = max(rec, nf.compose().distance(g))
        lam = max(lam, abs(np.exp(nf.t) - np.exp(t)) / np.exp(t))
    ok = rec <= 1e-8 and lam <= 1e-8
    assert record(5, "loxodromic normal form", ok, f"reconstruction {rec:.2e}, e^t rel error {lam:.2e} (tol 1e-8)")


def test_c06_north_south():
    rng = np.random.default_rng(106)
    worst = 0.0
    for m in (2, 3):
        h = random_element(m, rng)
        e1 = np.eye(m)[0]
        x, y = act(h, e1), act(h, -e1)
        z = random_ball_points(m, 400, rng)
        z = z[np.linalg.norm(z - y, axis=1) >= 0.1][:100]
        gs = [h @ make_a(float(n), m) @ h.inverse() for n in range(1, 21)]
        rep = verify_north_south(gs, z, exclusion=0.1, attractor=x, repeller=y)
        assert rep.n_points == 100
        worst = max(worst, rep.final)
    assert record(6, "North-South at n = 20", worst <= 1e-6, f"max distance {worst:.2e} (tol 1e-6)")


def test_c07_zariski_separation():
    wit = 0.0
    not_dense = 0
    for seed in range(3):
        rng = np.random.default_rng(200 + seed)
        G = GeneratorSet([random_k(2, rng), random_k(2, rng)], seed=seed)
        r = zariski_test(G, 2, seed=seed)
        not_dense += r.verdict == ZariskiVerdict.NOT_DENSE
        if r.witness is not None:
            fresh = sample_group_lifts(G, 100, np.random.default_rng(300 + seed))
            wit = max(wit, float(evaluate_witness(r, fresh).max()))
    dense = 0
    for seed in range(5):
        k = random_k(2, np.random.default_rng(seed))
        G = GeneratorSet([make_a(1.0, 2), k @ make_a(1.0, 2) @ k.inverse()], seed=seed)
        dense += zariski_test(G, 2, seed=seed).verdict == ZariskiVerdict.DENSE
    ok = not_dense == 3 and wit <= 1e-8 and dense == 5
    assert record(7, "Zariski test separation", ok,
                  f"K fixtures NotDense {not_dense}/3, witness {wit:.2e} (tol 1e-8); loxodromic DenseAtDegree(2) {dense}/5")


def test_c08_limit_set_near_fixed_points():
    G = GeneratorSet(schottky_pair(2, 3.0))
    ls = limit_set(G, 8, eps=1e-3)
    P = loxodromic_fixed_points(G, 8).all_points()
    d, _ = cKDTree(np.c_[P.real, P.imag]).query(np.c_[ls.points.real, ls.points.imag])
    assert record(8, "limit set vs loxodromic fixed points", d.max() <= 1e-2,
                  f"{len(ls)} limit points, max distance {d.max():.2e} (tol 1e-2)")


def test_c09_detector():
    rng = np.random.default_rng(109)
    triv, quad = trivial_embedding(2, 3), quadratic_map()
    h_triv = 0.0
    agree = total = 0
    for _ in range(100):
        x, y = random_sphere_points(2, 2, rng)
        rep = z_x_membership(triv, x, y)
        h_triv = max(h_triv, max(rep.h_values))
        agree += rep.detector_pass == rep.direct_pass
        total += 1
    rep = z_x_membership(quad, np.array([1, 0j]), np.array([0, 1 + 0j]))
    h_quad = max(rep.h_values)
    agree += rep.detector_pass == rep.direct_pass
    total += 1
    for _ in range(30):
        x, y = random_sphere_points(2, 2, rng)
        rep = z_x_membership(quad, x, y)
        agree += rep.detector_pass == rep.direct_pass
        total += 1
    ok = h_triv <= 1e-10 and h_quad >= 1e-3 and agree == total
    assert record(9, "detector gadget", ok,
                  f"trivial max h_n {h_triv:.2e} (tol 1e-10), quadratic max h_n {h_quad:.2e} (min 1e-3), "
                  f"agreement {agree}/{total}")


def test_c10_ftag():
    rng = np.random.default_rng(110)
    dist = 0.0
    ratio = np.inf
    branch_ok = True
    for m in (2, 3):
        for _ in range(5):
            g = random_element(m, rng)
            z = random_ball_points(m, 200, rng)
            fit = ftag_fit(z, act(g, z))
            dist = max(dist, GroupElement(fit.g, tol=1e-6).distance(g))
            ratio = min(ratio, fit.branch_ratio)
            branch_ok &= fit.branch == Branch.HOLOMORPHIC
    z = random_ball_points(2, 200, rng)
    W = quadratic_map()(z)
    rejected = 0
    worst_res = np.inf
    for J in ([0, 1], [0, 2], [1, 2]):
        try:
            ftag_fit(z, W[:, J])
        except NoFractionalLinearModel as exc:
            rejected += 1
            worst_res = min(worst_res, exc.residual)
    ok = dist <= 1e-9 and branch_ok and ratio >= 1e6 and rejected == 3 and worst_res >= 1e-2
    assert record(10, "FTAG fit", ok,
                  f"recovery {dist:.2e} (tol 1e-9), min branch ratio {ratio:.1e} (min 1e6), "
                  f"quadratic rejected {rejected}/3 with min residual {worst_res:.2e} (min 1e-2)")


def test_c11_loxodromic_pairs():
    worst = 0.0
    ok = True
    for seed in (5, 6, 7):
        f, pairs, *_ = conjugated_trivial_family(seed=seed)
        for p in pairs:
            rep = check_loxo_pair(f, p)
            ok &= rep.psi_kind == Kind.LOXODROMIC.value and rep.upper_ok
            worst = max(worst, rep.axis_residual)
    ok = ok and worst <= 1e-9
    assert record(11, "loxodromic pair theorem", ok, f"psi loxodromic, lambda1 bound held: {ok}; "
                  f"axis containment {worst:.2e} (tol 1e-9)")


def test_c12_rigidity():
    worst = 0.0
    verdicts = []
    for seed in (5, 6):
        f, pairs, *_ = conjugated_trivial_family(seed=seed)
        res = rigidity_verify(f, pairs, n_check=1000)
        verdicts.append(res.verdict)
        if res.verdict == Verdict.EQUIVALENT:
            z = random_ball_points(2, 1000, np.random.default_rng(400 + seed))
            target = np.c_[z, np.zeros(1000)]
            worst = max(worst, float(np.max(np.linalg.norm(res.phi2(f(res.phi1(z))) - target, axis=1))))
    rng = np.random.default_rng(3)
    qpairs = [SymmetryPair(make_k(U), make_k(quadratic_symmetry(U)))
              for U in (haar_unitary(2, rng), haar_unitary(2, rng))]
    q = rigidity_verify(quadratic_map(), qpairs)
    q_ok = q.verdict in (Verdict.NOT_EQUIVALENT, Verdict.PRECONDITION_FAILED) and bool(q.certificate)
    ok = all(v == Verdict.EQUIVALENT for v in verdicts) and worst <= 1e-7 and q_ok
    assert record(12, "rigidity pipeline", ok,
                  f"conjugated family {[v.value for v in verdicts]}, residual {worst:.2e} (tol 1e-7); "
                  f"quadratic {q.verdict.value} at stage {q.stage}")


def test_c13_rescaling_bound():
    rng = np.random.default_rng(113)
    h = Polynomial(3, {(0, 1, 0): 1.0, (2, 0, 0): 1.0})
    ok = True
    worst_ratio = 0.0
    for t in (0.5, 1.0):
        prob = RescalingProblem(h, t, np.eye(1))
        v = rng.uniform(-1, 1, 1000)
        w = (rng.uniform(-1, 1, 1000) + 1j * rng.uniform(-1, 1, 1000))[:, None]
        for n in (2, 4, 8, 16):
            gap = np.abs(prob.rescaled(v, w, n) - w[:, 0].real)
            bound = 10 * np.exp(-3 * n * t) * v**2
            ok &= bool(np.all(gap <= bound))
            worst_ratio = max(worst_ratio, float(np.max(gap / bound)))
    assert record(13, "rescaling bound", ok, f"max gap/bound {worst_ratio:.3f} (max 1)")


def test_c14_cayley_and_flow():
    rng = np.random.default_rng(114)
    rt = 0.0
    for m in (2, 3):
        z = random_ball_points(m, 1000, rng)
        z = z[np.abs(1 + z[:, 0]) > 0.1]
        rt = max(rt, float(np.max(np.abs(cayley_inv(cayley(z)) - z))))
        # Siegel domain points Im w1 > |w'|^2
        wp = (rng.uniform(-1, 1, (1000, m - 1)) + 1j * rng.uniform(-1, 1, (1000, m - 1)))
        w1 = rng.uniform(-2, 2, 1000) + 1j * (np.sum(np.abs(wp) ** 2, axis=1) + rng.uniform(0.01, 2, 1000))
        w = np.c_[w1, wp]
        rt = max(rt, float(np.max(np.abs(cayley(cayley_inv(w)) - w))))
    flow = 0.0
    for m in (2, 3):
        for t in (0.3, 1.0):
            k = make_m(haar_unitary(m - 1, rng))
            flow = max(flow, flow_conjugacy_residual(k, t, random_sphere_points(m, 1000, rng)))
    ok = rt <= 1e-12 and flow <= 1e-9
    assert record(14, "Cayley transform", ok, f"round trips {rt:.2e} (tol 1e-12), flow conjugacy {flow:.2e} (tol 1e-9)")
