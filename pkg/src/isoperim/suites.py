"""Named verification cases, grouped into suites for the command line.

A case is a function of the run settings returning a list of result rows
(plain dicts, ready for JSON).  Cases are pure: everything random is drawn
from a generator seeded by (seed, case name), so a case produces the same
rows in any process and in any order.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .inequalities import (
    TestFunction,
    brezis_wainger_report,
    coarea_check,
    hardy_operator_norm_estimate,
    local_poincare,
    ri_sobolev,
    strichartz_check,
    transference_check,
    uncertainty_additive,
    uncertainty_multiplicative,
)
from .profiles import jubileo_constant, make_profile, validate_profile_against_space
from .rearrange import (
    RiNormSpec,
    decreasing_rearrangement,
    distribution_function,
    maximal_average,
    median,
    product_partial_integral,
    ri_norm,
)
from .spaces import Field, build_space
from .weights import (
    analyze_weight,
    construct_weight,
    dt_constant,
    half_plane_experimental_measure,
    isoperimetric_constant,
    marcinkiewicz_weight_norm,
    necessary_condition_check,
    prototype_g,
    radial_descriptor,
)


@dataclass(frozen=True)
class Settings:
    seed: int = 42
    resolution: int = 256
    tolerance: float = 0.05
    exact_tolerance: float = 1e-9


def rng_for(settings: Settings, name: str) -> np.random.Generator:
    return np.random.default_rng([settings.seed, zlib.crc32(name.encode())])


# ----------------------------------------------------------------------------
# spaces and profiles used by the suites


@lru_cache(maxsize=None)
def _space(kind: str, resolution: int, **params):
    return build_space(kind, resolution=resolution, **params)


def plane(s: Settings):
    return _space("euclidean_box", s.resolution, n=2, halfwidth=4.0)


def sphere(s: Settings):
    return _space("sphere", max(16, s.resolution // 2), n=2)


def gauss_line(s: Settings):
    return _space("log_concave", 16 * s.resolution, p=2.0, n=1)


def log_line(s: Settings, p: float):
    return _space("log_concave", 16 * s.resolution, p=p, n=1)


def half_plane(s: Settings):
    return _space("half_plane", s.resolution, halfwidth=4.0)


def unit_square(s: Settings):
    return _space("euclidean_box", s.resolution, n=2, halfwidth=0.5)


P_PLANE = make_profile("euclidean", n=2)
P_SPHERE = make_profile("sphere", n=2)
P_GAUSS = make_profile("log_concave", p=2.0)


# ----------------------------------------------------------------------------
# result rows


def _finite(x):
    return float(x) if x is not None else None


def row_inequality(report) -> dict:
    out = report.to_dict()
    out["kind"] = "report_only" if report.report_only else "inequality"
    if report.witnesses:
        out["_curve"] = report.witnesses
    return out


def row_agree(name: str, value: float, expected: float, rel_tol: float, **details) -> dict:
    rel = abs(value - expected) / abs(expected) if expected else abs(value)
    return {"name": name, "kind": "agreement", "value": float(value), "expected": float(expected),
            "rel_error": float(rel), "tolerance": rel_tol, "pass": bool(rel <= rel_tol),
            "details": details}


def row_bound(name: str, value: float, bound: float, **details) -> dict:
    return {"name": name, "kind": "bound", "value": float(value), "bound": float(bound),
            "pass": bool(value <= bound), "details": details}


def row_range(name: str, value: float, lo: float, hi: float, **details) -> dict:
    return {"name": name, "kind": "range", "value": float(value), "lo": float(lo), "hi": float(hi),
            "pass": bool(lo <= value <= hi), "details": details}


def row_info(name: str, **values) -> dict:
    return {"name": name, "kind": "info", "pass": True, "details": values}


# ----------------------------------------------------------------------------
# core


def case_c_iso_plane(s: Settings):
    sp = plane(s)
    w = Field(np.linalg.norm(sp.points, axis=1))
    a = analyze_weight(w, sp, P_PLANE)
    return [row_agree("C_iso(|x|) on R^2", a.C_iso, 0.5, s.tolerance, censored=a.censored),
            row_bound("C_iso vs M_norm gap for |x|", a.lemma_gap, 0.02, C_iso=a.C_iso, M_norm=a.M_norm),
            row_agree("DT constant of |x|", a.dt_constant, 1.0, s.tolerance)]


def case_profile_sphere(s: Settings):
    t = np.linspace(1 / 1024, 1 - 1 / 1024, 512)
    err = float(np.max(np.abs(P_SPHERE(t) - np.sqrt(t * (1 - t)))))
    return [row_bound("S^2 profile vs sqrt(t(1-t))", err, 1e-6)]


def case_profile_gauss(s: Settings):
    t = np.linspace(0.01, 0.49, 64)
    sym = float(np.max(np.abs(P_GAUSS(t) - P_GAUSS(1 - t))))
    return [row_bound("Gaussian I(1/2) error", abs(P_GAUSS(0.5) - 1 / math.sqrt(2 * math.pi)), 1e-8),
            row_bound("Gaussian profile symmetry", sym, 1e-9)]


def _tent():
    return TestFunction("tent", {"R": 1.0}, "compact_support")


def case_coarea_tent(s: Settings):
    rep = coarea_check(plane(s), P_PLANE, _tent(), tolerance=s.tolerance)
    return [row_inequality(rep),
            row_range("coarea tent tightness", rep.ratio, 0.95, 1 + s.exact_tolerance)]


def case_uncertainty_tent(s: Settings):
    sp = plane(s)
    w = Field(np.linalg.norm(sp.points, axis=1))
    add1 = uncertainty_additive(sp, P_PLANE, w, _tent(), p=1, alpha=1, tolerance=s.tolerance)
    d = add1.details
    mult = uncertainty_multiplicative(sp, P_PLANE, w, _tent(), p=1, alpha=1, tolerance=s.tolerance)
    add2 = uncertainty_additive(sp, P_PLANE, w, _tent(), p=2, alpha=1, tolerance=s.tolerance)
    identity = abs(mult.details["additive_at_balance"] - 3 * mult.rhs) / (3 * mult.rhs)
    return [
        row_agree("tent ||f||_1", d["norm_f"], math.pi / 3, 0.02),
        row_agree("tent ||grad f||_1", d["norm_grad"], math.pi, 0.02),
        row_agree("tent ||w f||_1", d["norm_weighted"], math.pi / 6, 0.02),
        row_inequality(add1),
        row_inequality(mult),
        row_inequality(add2),
        row_bound("additive bound at balancing r equals 3x multiplicative", identity, s.exact_tolerance),
    ]


def case_sobolev_tent(s: Settings):
    rep = ri_sobolev(plane(s), P_PLANE, RiNormSpec.lp(1), _tent(), tolerance=s.tolerance)
    return [row_inequality(rep),
            row_agree("r.i. Sobolev tent lhs", rep.lhs, 2 * math.pi, 0.02),
            row_agree("r.i. Sobolev tent rhs", rep.rhs, 2 * math.pi, 0.02)]


def case_strichartz_tent(s: Settings):
    sp = plane(s)
    g = Field(1.0 / np.linalg.norm(sp.points, axis=1))
    rep = strichartz_check(sp, P_PLANE, RiNormSpec.lp(1), _tent(), g, tolerance=s.tolerance)
    return [row_inequality(rep),
            row_range("Strichartz tent tightness", rep.ratio, 0.95, 1 + s.exact_tolerance)]


# ----------------------------------------------------------------------------
# rearrangement


def _random_field(rng, atoms: int):
    weights = rng.uniform(0.1, 1.0, atoms)
    if rng.random() < 0.5:
        values = rng.normal(size=atoms)
    else:
        values = rng.integers(-5, 6, atoms).astype(float)
    return values, weights


def case_equimeasurability(s: Settings):
    rng = rng_for(s, "equimeasurability")
    worst_inv, worst_eq = 0.0, 0.0
    for _ in range(100):
        values, weights = _random_field(rng, 200)
        fs = decreasing_rearrangement(values, weights)
        mu = distribution_function(values, weights)
        total = float(np.sum(weights))
        levels = np.concatenate([[0.0], mu.breakpoints[1:]]) if mu.breakpoints[0] == 0 else mu.breakpoints
        mu_at = mu(levels)
        for b, v in zip(fs.breakpoints, fs.values):
            t_inv = levels[np.argmax(mu_at <= b + 1e-12 * total)]
            worst_inv = max(worst_inv, abs(t_inv - v))
        probe = np.concatenate([levels, rng.uniform(0, np.abs(values).max(), 50)])
        lengths = fs.lengths
        for t in probe:
            worst_eq = max(worst_eq, abs(mu(t) - float(np.sum(lengths[fs.values > t]))) / total)
    return [row_bound("f* vs inverse of mu_f", worst_inv, 1e-12),
            row_bound("equimeasurability", worst_eq, 1e-12)]


def case_hardy_littlewood(s: Settings):
    rng = rng_for(s, "hardy_littlewood")
    worst = -math.inf
    for _ in range(1000):
        u, weights = _random_field(rng, 50)
        v, _ = _random_field(rng, 50)
        for t in rng.uniform(0, float(np.sum(weights)), 3):
            lhs, rhs = product_partial_integral(u, v, weights, t)
            worst = max(worst, lhs - rhs)
    return [row_bound("Hardy-Littlewood excess", worst, 1e-12)]


def case_subadditivity(s: Settings):
    rng = rng_for(s, "subadditivity")
    worst1 = worst2 = -math.inf
    for _ in range(200):
        u, weights = _random_field(rng, 60)
        v, _ = _random_field(rng, 60)
        us, vs = decreasing_rearrangement(u, weights), decreasing_rearrangement(v, weights)
        ws = decreasing_rearrangement(u + v, weights)
        probe = rng.uniform(1e-3, float(np.sum(weights)), 20)
        worst1 = max(worst1, float(np.max(ws(probe) - us(probe / 2) - vs(probe / 2))))
        uu, vv, ww = maximal_average(us), maximal_average(vs), maximal_average(ws)
        worst2 = max(worst2, float(np.max(ww(probe) - uu(probe) - vv(probe))))
    return [row_bound("(u+v)*(s) - u*(s/2) - v*(s/2)", worst1, 1e-12),
            row_bound("(u+v)** - u** - v**", worst2, 1e-12)]


def case_majorization(s: Settings):
    """Block averages of g* are majorized by g*, so r.i. norms must not grow."""
    rng = rng_for(s, "majorization")
    phi = lambda t: np.sqrt(np.asarray(t, dtype=float))  # noqa: E731
    norms = [RiNormSpec.lp(1), RiNormSpec.lp(2), RiNormSpec.lorentz(2, 1)]
    worst, worst_m = -math.inf, -math.inf
    for _ in range(200):
        atoms = 80
        weights = np.full(atoms, 1.0 / atoms)
        g = np.sort(np.abs(rng.normal(size=atoms)) * rng.uniform(0.5, 3.0))[::-1]
        cuts = np.sort(rng.choice(np.arange(1, atoms), size=rng.integers(1, 20), replace=False))
        f = np.concatenate([np.full(len(b), b.mean()) for b in np.split(g, cuts)])
        fs, gs = decreasing_rearrangement(f, weights), decreasing_rearrangement(g, weights)
        grid = np.linspace(0, 1, 257)[1:]
        assert np.all(fs.integral(grid) <= gs.integral(grid) + 1e-12)
        for nm in norms:
            worst = max(worst, ri_norm(fs, nm) / ri_norm(gs, nm) - 1)
        # weak-type norm: ||f||_M <= sup g** Phi over the right ends of f's steps
        ends = fs.edges[1:]
        bound = float(np.max(maximal_average(gs)(ends) * phi(ends)))
        worst_m = max(worst_m, ri_norm(fs, RiNormSpec.marcinkiewicz(phi)) / bound - 1)
    return [row_bound("majorized norms (Lp(1), Lp(2), L(2,1)) relative excess", worst, 1e-10),
            row_bound("majorized Marcinkiewicz norm vs sup g**Phi", worst_m, 1e-10)]


def case_median_estimate(s: Settings):
    rng = rng_for(s, "median_estimate")
    worst = 0.0
    for _ in range(200):
        values, weights = _random_field(rng, 100)
        values = values + rng.normal() * 3
        bound = 2 / np.sum(weights) * np.sum(weights * np.abs(values))
        worst = max(worst, abs(median(values, weights)) / bound if bound else 0.0)
    sp = sphere(s)
    for k in range(3):
        v = sp.points[:, k] + 0.3
        worst = max(worst, abs(median(v, sp)) / (2 * np.sum(sp.weights * np.abs(v))))
    return [row_bound("|m(f)| / ((2/mu) ||f||_1)", worst, 1.0)]


# ----------------------------------------------------------------------------
# profiles


def case_profile_validation(s: Settings):
    rows = []
    cases = [("R^2 disks", P_PLANE, plane(s)), ("S^2 caps", P_SPHERE, sphere(s)),
             ("Gaussian half-lines", P_GAUSS, gauss_line(s)),
             ("log-concave p=1.5 half-lines", make_profile("log_concave", p=1.5), log_line(s, 1.5)),
             ("half-plane half-disks (lower bound)", make_profile("half_plane"), half_plane(s))]
    for label, prof, sp in cases:
        val = validate_profile_against_space(prof, sp, tolerance=s.tolerance)
        ratios = [r["ratio"] for r in val.rows if not r["degenerate"]]
        rows.append(row_bound(f"profile violations: {label}", len(val.violations), 0,
                              min_ratio=min(ratios), max_ratio=max(ratios), sets=len(val.rows)))
    return rows


def _probe(prof):
    end = prof.domain_end if prof.finite else 10.0
    return np.linspace(end / 1024, end * (1 - 1 / 1024), 512)


CATALOG = [("euclidean", {"n": 2}), ("euclidean", {"n": 3}), ("half_plane", {}),
           ("sphere", {"n": 1}), ("sphere", {"n": 2}), ("sphere", {"n": 3}),
           ("log_concave", {"p": 1.0}), ("log_concave", {"p": 1.5}), ("log_concave", {"p": 2.0})]


def case_profile_shape(s: Settings):
    worst_concave, worst_sym, worst_mono, worst_phi = -math.inf, 0.0, -math.inf, -math.inf
    for kind, params in CATALOG:
        prof = make_profile(kind, **params)
        t = _probe(prof)
        iso = prof(t)
        worst_concave = max(worst_concave, float(np.max(np.diff(iso, 2))))
        if prof.symmetric:
            worst_sym = max(worst_sym, float(np.max(np.abs(iso - prof(prof.domain_end - t)))))
        q = t / iso
        worst_mono = max(worst_mono, float(np.max(-np.diff(q) / q[1:])))
        ph = prof.phi(t)
        worst_phi = max(worst_phi, float(np.max(-np.diff(ph))))
    return [row_bound("max second difference of I", worst_concave, 1e-10),
            row_bound("symmetry defect of finite-measure profiles", worst_sym, 1e-9),
            row_bound("relative decrease of t/I(t)", worst_mono, 1e-12),
            row_bound("decrease of Phi", worst_phi, 1e-12)]


def case_gauss_asymptote(s: Settings):
    t = 1e-6
    ratio = P_GAUSS(t) / (t * math.sqrt(2 * math.log(1 / t)))
    return [row_range("Gaussian I(t)/(t sqrt(2 log 1/t)) at 1e-6", ratio, 0.8, 1.2)]


def case_jubileo(s: Settings):
    return [row_info("jubileo constant R^2", C=jubileo_constant(P_PLANE, plane(s))),
            row_info("jubileo constant S^2", C=jubileo_constant(P_SPHERE, sphere(s)))]


# ----------------------------------------------------------------------------
# weights


def prototype_family(space, profile, domain_end=None):
    """Seven weights built from a g* P(g0), g0 the prototype: a g0^b + c."""
    g0 = prototype_g(profile, domain_end=domain_end)
    out = []
    for a, b, c in [(1, 1, 0), (2, 1, 0), (0.5, 1, 0), (1, 0.5, 0), (1, 0.75, 0.2), (1, 1, 1.0), (3, 0.9, 0.5)]:
        g = type(g0)(g0.breakpoints, a * g0.values**b + c, g0.domain_end)
        out.append(((a, b, c), construct_weight(space, g)))
    return out


def _weight_spaces(s: Settings):
    return [("R^2", plane(s), P_PLANE, 200.0), ("S^2", sphere(s), P_SPHERE, None),
            ("Gaussian line", gauss_line(s), P_GAUSS, None)]


def case_lemma_crosscheck(s: Settings):
    rows, gaps = [], []
    sp = plane(s)
    weights = [("R^2", "|x|", sp, P_PLANE, Field(np.linalg.norm(sp.points, axis=1)))]
    for label, space, prof, end in _weight_spaces(s):
        for abc, w in prototype_family(space, prof, end):
            weights.append((label, f"a,b,c={abc}", space, prof, w))
    for label, name, space, prof, w in weights:
        a = analyze_weight(w, space, prof)
        gaps.append(a.lemma_gap)
        rows.append({"space": label, "weight": name, "C_iso": a.C_iso, "M_norm": a.M_norm})
    return [row_bound("max |C_iso - M_norm| / M_norm", max(gaps), 0.02, weights=len(gaps), rows=rows)]


def case_constructed_bound(s: Settings):
    rows = []
    for label, space, prof, end in _weight_spaces(s):
        g = prototype_g(prof, domain_end=end)
        w = construct_weight(space, g, profile=prof)
        rows.append(row_bound(f"C_iso of prototype weight on {label}",
                              isoperimetric_constant(w, space, prof), 1 + s.tolerance))
        strict = isoperimetric_constant(w, space, prof, strict=True)
        closed = isoperimetric_constant(w, space, prof)
        rows.append(row_bound(f"closed vs strict level sets on {label}",
                              abs(closed - strict) / closed, s.tolerance))
    return rows


def case_ball_growth(s: Settings):
    sp, sph = plane(s), sphere(s)
    r = np.linalg.norm(sp.points, axis=1)
    rows = [row_agree("DT constant of 2|x|", dt_constant(Field(2 * r), sp), 0.25, s.tolerance)]
    j_plane = jubileo_constant(P_PLANE, sp)
    j_sphere = jubileo_constant(P_SPHERE, sph)
    polar = np.arccos(np.clip(sph.points[:, 2], -1, 1))
    checked, worst = 0, 0.0
    for lam in (1.1, 1.5, 2.0, 3.0, 5.0):
        for c in (0.0, 0.1):
            for space, prof, dist, jc in ((sp, P_PLANE, r, j_plane), (sph, P_SPHERE, polar, j_sphere)):
                w = Field(lam * dist + c)
                if dt_constant(w, space) <= 1 + 1e-12:  # rounding at full mass
                    checked += 1
                    worst = max(worst, isoperimetric_constant(w, space, prof) / jc)
    rows.append(row_bound("C_iso / jubileo constant for ball-growth weights", worst, 1 + s.tolerance,
                          weights=checked))
    rows.append(row_range("ball-growth weights checked", checked, 20, math.inf))
    # level sets nest: w1 <= w2 pointwise gives C(w1) >= C(w2)
    c_vals = [isoperimetric_constant(Field(lam * r), sp, P_PLANE) for lam in (1.0, 1.5, 2.0, 4.0)]
    rows.append(row_bound("C_iso increase under pointwise increase", float(np.max(np.diff(c_vals))), 0.0))
    return rows


def case_necessary_condition(s: Settings):
    sp = plane(s)
    r = np.linalg.norm(sp.points, axis=1)
    grid = [0.75, 1.0, 1.5, 2.0, 2.5]
    rep = necessary_condition_check(Field(r), sp, grid)
    ratios = [row["ratio"] for row in rep.rows]
    sq = necessary_condition_check(Field(r**2), sp, [0.25, 0.5, 1.0, 2.0, 4.0])
    return [row_agree("mu{|x|<=t} / (t P) max", max(ratios), 0.5, s.tolerance),
            row_agree("mu{|x|<=t} / (t P) min", min(ratios), 0.5, s.tolerance),
            row_info("necessary-condition ratios for |x|^2", rows=sq.rows, sup=sq.sup_ratio)]


def case_half_plane_weight(s: Settings):
    sp = half_plane(s)
    prof = make_profile("half_plane")
    g = prototype_g(prof, domain_end=100.0)
    w = construct_weight(sp, g, profile=prof)
    radial = radial_descriptor(sp)
    rho = np.array([0.5, 1.0, 2.0])
    return [row_bound("C_iso of prototype weight on the half-plane",
                      isoperimetric_constant(w, sp, prof), 1 + s.tolerance),
            row_info("half-plane sublevel measure: generic vs Beta expression (k=0)",
                     generic=[float(x) for x in radial.m(rho)],
                     beta_expression=[float(x) for x in half_plane_experimental_measure(rho, 0.0)])]


# ----------------------------------------------------------------------------
# uncertainty


def case_uncertainty_plane(s: Settings):
    sp = plane(s)
    w = Field(np.linalg.norm(sp.points, axis=1))
    rows = []
    fns = [TestFunction("tent", {"R": 0.5}, "compact_support"),
           TestFunction("tent", {"R": 2.0, "center": (0.5, -0.5)}, "compact_support"),
           TestFunction("smooth_indicator", {"a": 1.0, "eps": 0.5}, "compact_support")]
    for f in fns:
        for p in (1, 2):
            for alpha in (1, 2):
                rows.append(row_inequality(uncertainty_additive(sp, P_PLANE, w, f, p, alpha,
                                                                tolerance=s.tolerance)))
                rows.append(row_inequality(uncertainty_multiplicative(sp, P_PLANE, w, f, p, alpha,
                                                                      tolerance=s.tolerance)))
    return rows


def case_uncertainty_sphere(s: Settings):
    sp = sphere(s)
    w = construct_weight(sp, prototype_g(P_SPHERE), profile=P_SPHERE)
    rows = []
    fns = [TestFunction("coordinate", {"k": 2}, "median_zero"),
           TestFunction("coordinate", {"k": 0}, "mean_zero"),
           TestFunction("bump", {"s": 0.5}, "median_zero")]
    for f in fns:
        for p in (1, 2):
            for alpha in (1, 2):
                rows.append(row_inequality(uncertainty_additive(sp, P_SPHERE, w, f, p, alpha,
                                                                tolerance=s.tolerance)))
                rows.append(row_inequality(uncertainty_multiplicative(sp, P_SPHERE, w, f, p, alpha,
                                                                      tolerance=s.tolerance)))
    return rows


def case_uncertainty_gauss(s: Settings):
    sp = gauss_line(s)
    w = construct_weight(sp, prototype_g(P_GAUSS), profile=P_GAUSS)
    rows = []
    fns = [TestFunction("hermite", {"s": 1.0}, "mean_zero"),
           TestFunction("coordinate", {"k": 0}, "median_zero"),
           TestFunction("bump", {"s": 0.7, "center": (0.5,)}, "median_zero")]
    for f in fns:
        for alpha in (1, 2):
            rows.append(row_inequality(uncertainty_additive(sp, P_GAUSS, w, f, 1, alpha,
                                                            tolerance=s.tolerance)))
            rows.append(row_inequality(uncertainty_multiplicative(sp, P_GAUSS, w, f, 1, alpha,
                                                                  tolerance=s.tolerance)))
    return rows


# ----------------------------------------------------------------------------
# Poincare, coarea, Sobolev, Strichartz


def sphere_functions():
    north, east = (0.0, 0.0, 1.0), (1.0, 0.0, 0.0)
    return [TestFunction("coordinate", {"k": 2}), TestFunction("coordinate", {"k": 0}),
            TestFunction("coordinate", {"k": 1}),
            TestFunction("bump", {"s": 0.5, "center": north}), TestFunction("bump", {"s": 1.0, "center": east}),
            TestFunction("tent", {"R": 1.0, "center": north}), TestFunction("tent", {"R": 2.0, "center": east}),
            TestFunction("smooth_indicator", {"a": 0.8, "eps": 0.3, "center": north}),
            TestFunction("smooth_indicator", {"a": 1.5, "eps": 0.5, "center": east}),
            TestFunction("tent", {"R": 0.6, "center": (0.6, 0.0, 0.8)})]


def line_functions():
    return [TestFunction("coordinate", {"k": 0}), TestFunction("hermite", {"s": 1.0}),
            TestFunction("hermite", {"s": 0.5}),
            TestFunction("tent", {"R": 1.0, "center": (0.5,)}), TestFunction("tent", {"R": 3.0}),
            TestFunction("bump", {"s": 0.5}), TestFunction("bump", {"s": 1.5, "center": (-1.0,)}),
            TestFunction("smooth_indicator", {"a": 1.0, "eps": 0.3}),
            TestFunction("smooth_indicator", {"a": 0.3, "eps": 1.0, "center": (1.0,)}),
            TestFunction("tent", {"R": 0.5, "center": (-2.0,)})]


def plane_functions():
    return [TestFunction("tent", {"R": R, "center": c}, "compact_support")
            for R, c in [(1.0, (0, 0)), (0.5, (0, 0)), (2.0, (0, 0)), (1.0, (1.0, 1.0)), (1.5, (-0.5, 0.5))]] + \
        [TestFunction("smooth_indicator", {"a": a, "eps": e, "center": c}, "compact_support")
         for a, e, c in [(1.0, 0.5, (0, 0)), (0.5, 1.0, (0, 0)), (2.0, 0.5, (0, 0)),
                         (0.5, 0.25, (1.0, -1.0)), (1.0, 1.0, (-1.0, 0.0))]]


def case_poincare(s: Settings):
    rows = []
    sp = sphere(s)
    lat = sp.latitude
    caps = [lat >= np.arcsin(1 - 2 * m) for m in (0.05, 0.1, 0.25, 0.5)] + [np.ones(len(sp), bool)]
    for f in sphere_functions()[:5]:
        for A in caps:
            rows.append(row_inequality(local_poincare(sp, P_SPHERE, f, A, tolerance=s.tolerance)))
    sp = gauss_line(s)
    x = sp.points[:, 0]
    sets = [x <= -1, x <= 0, np.abs(x) <= 0.5, x >= 1.5, np.ones(len(sp), bool)]
    for f in line_functions()[:5]:
        for A in sets:
            rows.append(row_inequality(local_poincare(sp, P_GAUSS, f, A, tolerance=s.tolerance)))
    return rows


def case_coarea_family(s: Settings):
    rows = []
    for sp, prof, fns in ((plane(s), P_PLANE, plane_functions()), (sphere(s), P_SPHERE, sphere_functions()),
                          (gauss_line(s), P_GAUSS, line_functions())):
        for f in fns:
            rows.append(row_inequality(coarea_check(sp, prof, f, tolerance=s.tolerance)))
    return rows


def case_ri_sobolev(s: Settings):
    rows = []
    sp = plane(s)
    for nm in (RiNormSpec.lp(1), RiNormSpec.lp(1.5), RiNormSpec.lorentz(1.5, 1)):
        for f in plane_functions()[:3]:
            rows.append(row_inequality(ri_sobolev(sp, P_PLANE, nm, f, tolerance=s.tolerance)))
    for sp, prof, fns in ((sphere(s), P_SPHERE, sphere_functions()[:3]),
                          (gauss_line(s), P_GAUSS, line_functions()[:3])):
        for nm in (RiNormSpec.lp(1), RiNormSpec.lp(2), RiNormSpec.lorentz(2, 1)):
            q = hardy_operator_norm_estimate(prof, nm)
            for f in fns:
                rows.append(row_inequality(ri_sobolev(sp, prof, nm, f, q_norm=q, tolerance=s.tolerance)))
    return rows


def case_strichartz(s: Settings):
    sp = plane(s)
    g = Field(1.0 / np.linalg.norm(sp.points, axis=1))
    rows = []
    for nm in (RiNormSpec.lp(1), RiNormSpec.lorentz(1.5, 1), RiNormSpec.lp(1.5)):
        for f in plane_functions()[:3]:
            rows.append(row_inequality(strichartz_check(sp, P_PLANE, nm, f, g, tolerance=s.tolerance)))
    sph = sphere(s)
    for g_s in (Field(np.ones(len(sph))), Field(1.0 / np.maximum(np.arccos(np.clip(sph.points[:, 2], -1, 1)), 1e-3))):
        for f in sphere_functions()[:3]:
            rows.append(row_inequality(strichartz_check(sph, P_SPHERE, RiNormSpec.lp(1), f, g_s,
                                                        tolerance=s.tolerance)))
    return rows


def case_brezis_wainger(s: Settings):
    sp = unit_square(s)
    fns = [TestFunction("tent", {"R": R}, "compact_support") for R in (0.2, 0.3, 0.4)]
    rows = []
    r = np.linalg.norm(sp.points, axis=1)
    for label, g in (("g=1", np.ones(len(sp))), ("g=-log|x|", np.log(1 / r))):
        ratios = [brezis_wainger_report(sp, f, Field(g)).ratio for f in fns]
        rows.append(row_info(f"Brezis-Wainger empirical constant ({label})", max_ratio=max(ratios),
                             ratios=ratios))
    return rows


# ----------------------------------------------------------------------------
# transference


def case_transference(s: Settings):
    sp = gauss_line(s)
    p1, p2 = P_GAUSS, P_GAUSS.scaled(0.9)
    rng = rng_for(s, "transference")
    base = construct_weight(sp, prototype_g(p1), profile=p1)
    fields = [base] + [Field(base.values * rng.uniform(0.5, 2.0, len(sp))) for _ in range(19)]
    worst = 0.0
    for w in fields:
        n1 = marcinkiewicz_weight_norm(w, sp, p1)
        n2 = marcinkiewicz_weight_norm(w, sp, p2)
        worst = max(worst, n1 / n2 - 1)
    rows = [row_bound("M(Phi1) vs M(Phi2) norm excess over 20 fields", worst, 1e-12)]
    f = TestFunction("hermite", {"s": 1.0}, "mean_zero")
    for alpha in (1, 2):
        rows.append(row_inequality(transference_check(p1, p2, sp, base, f, alpha=alpha,
                                                      tolerance=s.tolerance)))
    sph = sphere(s)
    w = construct_weight(sph, prototype_g(P_SPHERE), profile=P_SPHERE)
    n1 = marcinkiewicz_weight_norm(w, sph, P_SPHERE)
    n2 = marcinkiewicz_weight_norm(w, sph, P_SPHERE.scaled(0.5))
    rows.append(row_agree("halving I doubles the M(Phi) norm", n2, 2 * n1, 1e-12))
    return rows


# ----------------------------------------------------------------------------

CASES = {
    "core.c_iso_plane": case_c_iso_plane,
    "core.profile_sphere": case_profile_sphere,
    "core.profile_gauss": case_profile_gauss,
    "core.coarea_tent": case_coarea_tent,
    "core.uncertainty_tent": case_uncertainty_tent,
    "core.sobolev_tent": case_sobolev_tent,
    "core.strichartz_tent": case_strichartz_tent,
    "rearrangement.equimeasurability": case_equimeasurability,
    "rearrangement.hardy_littlewood": case_hardy_littlewood,
    "rearrangement.subadditivity": case_subadditivity,
    "rearrangement.majorization": case_majorization,
    "rearrangement.median_estimate": case_median_estimate,
    "profiles.validation": case_profile_validation,
    "profiles.shape": case_profile_shape,
    "profiles.gauss_asymptote": case_gauss_asymptote,
    "profiles.jubileo": case_jubileo,
    "weights.lemma_crosscheck": case_lemma_crosscheck,
    "weights.constructed_bound": case_constructed_bound,
    "weights.ball_growth": case_ball_growth,
    "weights.necessary_condition": case_necessary_condition,
    "weights.half_plane": case_half_plane_weight,
    "uncertainty.plane": case_uncertainty_plane,
    "uncertainty.sphere": case_uncertainty_sphere,
    "uncertainty.gauss": case_uncertainty_gauss,
    "sobolev.poincare": case_poincare,
    "sobolev.coarea_family": case_coarea_family,
    "sobolev.ri_sobolev": case_ri_sobolev,
    "sobolev.strichartz": case_strichartz,
    "sobolev.brezis_wainger": case_brezis_wainger,
    "transference.gauss": case_transference,
}

SUITES = ("core", "rearrangement", "profiles", "weights", "uncertainty", "sobolev", "transference", "all")


def suite_cases(suite: str) -> list[str]:
    if suite not in SUITES:
        raise KeyError(suite)
    if suite == "all":
        return list(CASES)
    return [name for name in CASES if name.split(".")[0] == suite]


def run_case(name: str, settings: Settings) -> list[dict]:
    return CASES[name](settings)
