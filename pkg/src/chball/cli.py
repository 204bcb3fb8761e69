"""Command line interface: ``chball <subcommand> [options]``.

Exit codes: 0 on success (including negative verdicts), 1 when a
mathematical precondition fails, 2 on usage, I/O or schema errors.
Structured results go to stdout (or ``--out``) as canonical JSON.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import serialize as ser
from .config import DEFAULT, Config, load_config
from .core import GroupElement, boundary_point
from .dynamics import contraction_rate, verify_north_south
from .errors import ChballError
from .maps.detector import z_x_membership
from .maps.ftag import ftag_fit
from .maps.polynomial import Polynomial
from .maps.rational import RationalProperMap, holder_estimate, validate_map
from .maps.rigidity import rigidity_verify
from .maps.symmetry import SymmetryPair
from .normal_forms import kak, loxodromic_normal_form
from .sampling import random_ball_points, random_sphere_points
from .siegel import (
    RescalingProblem,
    cayley,
    cayley_inv,
    flow_conjugacy_residual,
    m_block,
    recurrence_times,
    rescaling_limit,
    siegel_defect,
    zeta,
    zeta_inv,
)
from .spectral import Kind, classify
from .subgroups import GeneratorSet, limit_set, zariski_test

TOL_FIELDS = [f.name for f in dataclasses.fields(Config) if f.name.startswith("tol") or f.name == "rate_tol"]


# ---------------------------------------------------------------------------
# input helpers


def _element(path) -> GroupElement:
    return ser.element_from_json(ser.read_json(path, "in_group_element"))


def _point(path) -> np.ndarray:
    return ser.array_from_json(ser.read_json(path, "in_point"))


def _generators(path, seed: int) -> GeneratorSet:
    data = ser.read_json(path, "in_generators")
    if isinstance(data, list):
        data = {"gens": data}
    gens = [ser.element_from_json(g) for g in data["gens"]]
    return GeneratorSet(gens, data.get("labels"), seed=seed)


def _map(path) -> RationalProperMap:
    return RationalProperMap.from_json(ser.read_json(path, "in_map"))


def _pairs(path) -> list[SymmetryPair]:
    data = ser.read_json(path, "in_pairs")
    if isinstance(data, dict):
        data = data["pairs"]
    return [SymmetryPair(ser.element_from_json(p["phi"]), ser.element_from_json(p["psi"])) for p in data]


def _int_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _write_csv(path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise ser.InputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _real_coords(points: np.ndarray) -> np.ndarray:
    return np.stack([points.real, points.imag], axis=-1).reshape(len(points), -1)


def _write_svg(path, points: np.ndarray, proj: tuple[int, int], size: int = 600):
    """Static scatter of two real coordinates, with the unit circle for scale."""
    X = _real_coords(points)
    i, j = proj
    if max(i, j) >= X.shape[1]:
        raise ser.InputError(f"projection index out of range (max {X.shape[1] - 1})")
    half = size / 2
    r = half * 0.95
    names = [f"{p}(z{k + 1})" for k in range(points.shape[1]) for p in ("Re", "Im")]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{half}" cy="{half}" r="{r:.2f}" fill="none" stroke="#999" stroke-width="1"/>',
        f'<text x="8" y="{size - 8}" font-size="12" font-family="sans-serif">'
        f"{names[i]} vs {names[j]}, {len(points)} points</text>",
    ]
    for px, py in zip(X[:, i], X[:, j]):
        lines.append(f'<circle cx="{half + r * px:.2f}" cy="{half - r * py:.2f}" r="0.8" fill="#1f4e9c"/>')
    lines.append("</svg>")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ser.InputError(f"cannot write {path}: {exc.strerror or exc}") from exc


# ---------------------------------------------------------------------------
# subcommands; each returns (payload, schema name)


def cmd_classify(a, cfg):
    g = _element(a.input)
    d = classify(g, tol_class=cfg.tol_class, tol_cluster=cfg.tol_cluster)
    if d.kind == Kind.LOXODROMIC:
        fixed = [d.fixed_plus, d.fixed_minus]
    elif d.kind == Kind.ELLIPTIC:
        fixed = [d.interior_fixed]
    else:
        fixed = [d.fixed_plus]
    return {"kind": d.kind, "lambda1": d.lambda1, "sigma1": d.sigma1, "fixed_points": fixed, "axis": d.axis}, "classify"


def cmd_kak(a, cfg):
    g = _element(a.input)
    f = kak(g, tol=cfg.tol_group)
    return {"k1": f.k1, "t": f.t, "k2": f.k2, "residual": f.residual(g)}, "kak"


def cmd_normal_form(a, cfg):
    g = _element(a.input)
    nf = loxodromic_normal_form(g, tol=cfg.tol_group)
    return {"h": nf.h, "k": nf.k, "t": nf.t, "lambda1": float(np.exp(nf.t)),
            "residual": nf.compose().distance(g)}, "normal_form"


def cmd_rates(a, cfg):
    g = _element(a.input)
    z = _point(a.z)
    est = contraction_rate(g, z, n_max=a.n, tol_line=cfg.tol_line, tol_bdry=cfg.tol_bdry)
    if a.csv:
        _write_csv(a.csv, ["n", "log_distance"], est.samples)
    return {"samples": est.samples, "slope": est.slope, "predicted": est.predicted, "on_axis": est.on_axis,
            "fit_range": list(est.fit_range), "relative_error": est.relative_error,
            "within_rate_tol": bool(est.relative_error <= cfg.rate_tol)}, "rates"


def cmd_north_south(a, cfg):
    g = _element(a.input)
    rng = np.random.default_rng(cfg.seed)
    z = _point(a.z)[None, :] if a.z else random_ball_points(g.m, a.samples, rng, r_max=1.0)
    gs = [g.power(n) for n in range(1, a.n + 1)]
    rep = verify_north_south(gs, z, exclusion=a.exclusion)
    if a.csv:
        _write_csv(a.csv, ["n", "max_distance"], [(n + 1, d) for n, d in enumerate(rep.max_distance)])
    return {"attractor": rep.attractor, "repeller": rep.repeller, "max_distance": rep.max_distance,
            "n_points": rep.n_points, "excluded": rep.excluded, "decreasing": rep.decreasing,
            "final": rep.final}, "north_south"


def cmd_limit_set(a, cfg):
    G = _generators(a.gens, cfg.seed)
    ls = limit_set(G, a.length, eps=a.eps, tol_dedup=cfg.tol_dedup, budget=cfg.word_budget)
    words = [G.render(w) for w in ls.words]
    if a.csv:
        X = _real_coords(ls.points)
        header = [f"{p}_z{k + 1}" for k in range(G.m) for p in ("re", "im")] + ["word"]
        _write_csv(a.csv, header, [[repr(float(v)) for v in row] + [w] for row, w in zip(X, words)])
    if a.svg:
        _write_svg(a.svg, ls.points, tuple(a.proj))
    return {"length": a.length, "eps": a.eps, "radius_cut": ls.radius_cut, "n_points": len(ls),
            "points": ls.points, "words": words}, "limit_set"


def cmd_zariski(a, cfg):
    G = _generators(a.gens, cfg.seed)
    rep = zariski_test(G, a.degree, n_samples=a.samples, seed=cfg.seed, tol_rank=cfg.tol_rank)
    return {"degree": rep.degree, "verdict": rep.verdict, "null_dim_group": rep.null_dim_group,
            "null_dim_ambient": rep.null_dim_ambient, "gap_group": rep.gap_group,
            "gap_ambient": rep.gap_ambient, "n_samples": rep.n_samples,
            "witness": None if rep.witness is None else np.real(rep.witness),
            "monomials": [list(e) for e in rep.monomials]}, "zariski"


def cmd_check_map(a, cfg):
    f = _map(a.map)
    rep = validate_map(f, a.samples, a.samples, seed=cfg.seed, tol_proper=cfg.tol_proper, tol_denom=cfg.tol_denom)
    holder = None
    if rep.proper:
        h = holder_estimate(f, seed=cfg.seed)
        holder = {"alpha": h.alpha, "C": h.C, "lemma_holds": h.lemma_holds, "lemma_max_ratio": h.lemma_max_ratio}
    return {"m": f.m, "M": f.M, "degree": f.degree, "q_min": rep.q_min, "boundary_residual": rep.boundary_residual,
            "interior_max": rep.interior_max, "proper": rep.proper, "holder": holder}, "check_map"


def cmd_detect_lines(a, cfg):
    f = _map(a.map)
    x = boundary_point(_point(a.x), cfg.tol_bdry)
    y = boundary_point(_point(a.y), cfg.tol_bdry)
    rep = z_x_membership(f, x, y, n_max=a.nmax, tol=cfg.tol_line, seed=cfg.seed)
    return rep.as_dict(), "detect_lines"


def cmd_ftag_fit(a, cfg):
    data = ser.read_json(a.samples, "in_samples")
    z = ser.array_from_json(data["z"])
    w = ser.array_from_json(data["w"])
    fit = ftag_fit(z, w, tol=cfg.tol_ftag)
    return {"g": fit.g, "branch": fit.branch, "residual": fit.residual, "other_residual": fit.other_residual,
            "branch_ratio": fit.branch_ratio, "nullity": fit.nullity}, "ftag_fit"


def cmd_rigidity(a, cfg):
    f = _map(a.map)
    pairs = _pairs(a.pairs)
    res = rigidity_verify(f, pairs, config=cfg, n_lines=a.lines, n_check=a.check)
    return {"verdict": res.verdict, "stage": res.stage, "residual": res.residual, "phi1": res.phi1,
            "phi2": res.phi2, "certificate": res.certificate, "assumptions": res.assumptions,
            "log": res.log}, "rigidity"


def cmd_siegel(a, cfg):
    k = _element(a.k)
    U = m_block(k, cfg.tol_group)
    rng = np.random.default_rng(cfg.seed)
    x = random_sphere_points(k.m, a.samples, rng)
    x = x[np.abs(1 + x[:, 0]) >= 0.1]
    z = random_ball_points(k.m, a.samples, rng)
    z = z[np.abs(1 + z[:, 0]) >= 0.1]
    F = cayley(z)
    rt = max(float(np.max(np.abs(cayley_inv(F) - z))), float(np.max(np.abs(cayley(cayley_inv(F)) - F))))
    v, w = zeta(x)
    chart = float(np.max(np.abs(zeta_inv(v, w) - x)))
    defect = float(np.max(np.abs(siegel_defect(cayley(x)))))
    return {"t": a.t, "U": U, "n_samples": int(len(x)), "flow_residual": flow_conjugacy_residual(k, a.t, x),
            "roundtrip_interior": rt, "roundtrip_chart": chart, "boundary_defect": defect}, "siegel"


def cmd_rescale(a, cfg):
    data = ser.read_json(a.problem, "in_rescale_problem")
    U = ser.array_from_json(data["U"])
    m = int(data["m"])
    if U.shape != (m - 1, m - 1):
        raise ser.InputError(f"U must be {m - 1} x {m - 1}")
    h = Polynomial.from_json(data["h"], 2 * m - 1)
    prob = RescalingProblem(h, float(data["t"]), U)
    n_list = a.nlist or recurrence_times(U, cfg.tol_u, count=4)
    rng = np.random.default_rng(cfg.seed)
    v = rng.uniform(-1, 1, a.samples)
    w = rng.uniform(-1, 1, (a.samples, m - 1)) + 1j * rng.uniform(-1, 1, (a.samples, m - 1))
    rep = rescaling_limit(prob, n_list, v, w, tol_u=cfg.tol_u)
    return {"N": rep.N, "P": prob.P, "n_list": rep.n_list, "max_gap": rep.max_gap, "decreasing": rep.decreasing,
            "C_fit": rep.C_fit, "envelope_ok": rep.envelope_ok, "n_samples": a.samples}, "rescale"


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON result here instead of stdout")
    common.add_argument("--config", help="config file of 'key = value' lines")
    common.add_argument("--seed", type=int, help="random seed (overrides the config)")
    for name in TOL_FIELDS:
        common.add_argument("--" + name.replace("_", "-"), dest=name, type=float, metavar="X")

    p = argparse.ArgumentParser(prog="chball", description="Numerical toolkit for the complex hyperbolic ball.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, func, help_):
        s = sub.add_parser(name, parents=[common], help=help_, description=help_)
        s.set_defaults(func=func)
        return s

    s = add("classify", cmd_classify, "classify an automorphism as elliptic, parabolic or loxodromic")
    s.add_argument("--in", dest="input", required=True)
    s = add("kak", cmd_kak, "KAK decomposition g = k1 a_t k2")
    s.add_argument("--in", dest="input", required=True)
    s = add("normal-form", cmd_normal_form, "loxodromic normal form g = h k a_t h^-1")
    s.add_argument("--in", dest="input", required=True)
    s = add("rates", cmd_rates, "contraction rate of g^n(z) towards the attracting fixed point")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--z", required=True)
    s.add_argument("--n", type=int, default=40)
    s.add_argument("--csv")
    s = add("north-south", cmd_north_south, "North-South dynamics of g^n on sampled points")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--z", help="single test point; random ball samples otherwise")
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--exclusion", type=float, default=0.1)
    s.add_argument("--csv")
    s = add("limit-set", cmd_limit_set, "limit set sample of a finitely generated group")
    s.add_argument("--gens", required=True)
    s.add_argument("--length", type=int, default=8)
    s.add_argument("--eps", type=float, default=1e-3)
    s.add_argument("--csv")
    s.add_argument("--svg")
    s.add_argument("--proj", type=_int_list, default=[0, 1],
                   help="two real coordinate indices for the SVG (Re z1, Im z1, Re z2, ...)")
    s = add("zariski", cmd_zariski, "finite-degree Zariski density test")
    s.add_argument("--gens", required=True)
    s.add_argument("--degree", type=int, default=2)
    s.add_argument("--samples", type=int)
    s = add("check-map", cmd_check_map, "validate a rational proper map")
    s.add_argument("--map", required=True)
    s.add_argument("--samples", type=int, default=2000)
    s = add("detect-lines", cmd_detect_lines, "does f map the line through x and y into a line?")
    s.add_argument("--map", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--nmax", type=int, default=8)
    s = add("ftag-fit", cmd_ftag_fit, "fit a fractional linear map to samples")
    s.add_argument("--samples", required=True)
    s = add("rigidity", cmd_rigidity, "decide equivalence of a symmetric proper map to (z, 0)")
    s.add_argument("--map", required=True)
    s.add_argument("--pairs", required=True)
    s.add_argument("--lines", type=int, default=10)
    s.add_argument("--check", type=int, default=1000)
    s = add("siegel", cmd_siegel, "Cayley transform and flow conjugacy checks")
    s.add_argument("--check-flow", action="store_true", required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--samples", type=int, default=1000)
    s = add("rescale", cmd_rescale, "rescaling limit of a polynomial under the straightened flow")
    s.add_argument("--problem", required=True)
    s.add_argument("--nlist", type=_int_list)
    s.add_argument("--samples", type=int, default=200)
    return p


def _config(a) -> Config:
    cfg = load_config(a.config) if a.config else DEFAULT
    changes = {n: getattr(a, n) for n in TOL_FIELDS if getattr(a, n) is not None}
    if a.seed is not None:
        changes["seed"] = a.seed
    return cfg.replace(**changes) if changes else cfg


def _emit(a, text: str):
    if a.out:
        try:
            Path(a.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ser.InputError(f"cannot write {a.out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if a.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _config(a)
    except (OSError, ValueError) as exc:
        print(f"chball: config error: {exc}", file=sys.stderr)
        return 2
    try:
        payload, _ = a.func(a, cfg)
        _emit(a, ser.dumps(payload))
        return 0
    except ser.InputError as exc:
        print(f"chball: {exc}", file=sys.stderr)
        return 2
    except (ChballError, ValueError, np.linalg.LinAlgError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("residual", "best", "bracket"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        print(f"chball: {type(exc).__name__}: {exc}", file=sys.stderr)
        try:
            _emit(a, ser.dumps(err))
        except ser.InputError:
            return 2
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
