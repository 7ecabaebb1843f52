"""Numerical verifiers for Poincare, coarea, uncertainty and Sobolev-type inequalities.

Each verifier evaluates both sides of one inequality on a discretized space
and returns an :class:`InequalityReport`.  Quantities that are exact on step
data (rearrangements, r.i. norms of step functions) are compared with a tight
tolerance; quantities that depend on the discretization of a continuum
(gradients, perimeters) use the looser global slack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import (
    ConditionViolated,
    InfiniteMeasureSpace,
    InvalidParams,
    OutOfDomain,
    ProfilesNotOrdered,
    UnsupportedKind,
)
from .profiles import PRIMITIVE_FLOOR, Profile, phi, phi_handle, profile_value
from .rearrange import (
    RiNormSpec,
    StepFunction,
    decreasing_rearrangement,
    median,
    ri_norm,
    ri_norm_of_function,
)
from .spaces import Field, SampleSpace, as_mask, check_support, gradient_modulus
from .weights import isoperimetric_constant, marcinkiewicz_weight_norm

DEFAULT_TOLERANCE = 0.05
EXACT_TOLERANCE = 1e-9
COAREA_LEVELS = 1024


def _ratio(lhs: float, rhs: float) -> float:
    if rhs > 0:
        return lhs / rhs
    return 0.0 if lhs <= 0 else math.inf


def _check(name: str, lhs: float, rhs: float, tolerance: float) -> dict:
    ratio = _ratio(lhs, rhs)
    return {"name": name, "lhs": lhs, "rhs": rhs, "ratio": ratio,
            "tolerance": tolerance, "passed": bool(ratio <= 1 + tolerance)}


@dataclass
class InequalityReport:
    """lhs <= rhs, judged as ratio <= 1 + tolerance.

    ``witnesses`` holds curve rows (``r, lhs, rhs, ratio``); ``checks`` holds
    named sub-inequalities that must pass as well.  Report-only results carry
    a ratio but never fail.
    """

    name: str
    lhs: float
    rhs: float
    constant_used: float | None = None
    tolerance: float = DEFAULT_TOLERANCE
    witnesses: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    report_only: bool = False

    @property
    def ratio(self) -> float:
        return _ratio(self.lhs, self.rhs)

    @property
    def passed(self) -> bool:
        if self.report_only:
            return True
        rows_ok = all(row["ratio"] <= 1 + self.tolerance for row in self.witnesses)
        return bool(self.ratio <= 1 + self.tolerance and rows_ok
                    and all(c["passed"] for c in self.checks))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "constant_used": self.constant_used,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "report_only": self.report_only,
            "checks": self.checks,
            "details": self.details,
            "provenance": self.provenance,
        }


def provenance(space: SampleSpace, profile: Profile | None, tolerance: float) -> dict:
    params = {k: v for k, v in space.params.items() if isinstance(v, (int, float, str))}
    return {
        "space": space.kind,
        "space_params": dict(sorted(params.items())),
        "profile": profile.label if profile is not None else None,
        "seed": space.params.get("seed", 0),
        "resolution": space.params.get("resolution"),
        "tolerance": tolerance,
    }


# ----------------------------------------------------------------------------
# test functions


NORMALIZATIONS = ("none", "median_zero", "mean_zero", "compact_support")


@dataclass(frozen=True)
class TestFunction:
    """An analytic test function with a normalization.

    Kinds (``d`` is the Euclidean or geodesic distance to ``center``):

    - ``tent``: (1 - d/R)_+, |grad| = 1/R inside the support
    - ``bump``: exp(-d^2 / (2 s^2))
    - ``coordinate``: x_k (on spheres: the k-th ambient coordinate)
    - ``smooth_indicator``: 1 for d <= a, 0 for d >= a + eps, linear between
    - ``hermite``: x_1 exp(-x_1^2 / (2 s^2)), odd in x_1
    - ``user``: explicit ``values`` (and optionally ``grad``)
    """

    __test__ = False  # not a pytest class

    kind: str
    params: dict = field(default_factory=dict)
    normalization: str = "none"

    @property
    def label(self) -> str:
        args = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items())
                        if isinstance(v, (int, float)))
        return f"{self.kind}({args})/{self.normalization}"

    def field(self, space: SampleSpace) -> Field:
        if self.normalization not in NORMALIZATIONS:
            raise InvalidParams(f"unknown normalization {self.normalization!r}")
        values, grad = self._evaluate(space)
        if self.normalization == "median_zero":
            if space.infinite:
                raise InfiniteMeasureSpace("median normalization needs finite measure")
            values = values - median(values, space)
        elif self.normalization == "mean_zero":
            if space.infinite:
                raise InfiniteMeasureSpace("mean normalization needs finite measure")
            values = values - np.sum(space.weights * values) / np.sum(space.weights)
        support = self.normalization == "compact_support"
        f = Field(values, grad, support_flag=support)
        if support and not check_support(space, f):
            raise InvalidParams(f"{self.label} does not vanish on the truncation layer")
        return f

    def _distance(self, space: SampleSpace) -> np.ndarray:
        pts = space.points
        if space.kind == "sphere":
            c = np.asarray(self.params.get("center", np.eye(pts.shape[1])[-1]), dtype=float)
            c = c / np.linalg.norm(c)
            return np.arccos(np.clip(pts @ c, -1.0, 1.0))
        c = np.asarray(self.params.get("center", np.zeros(pts.shape[1])), dtype=float)
        return np.linalg.norm(pts - c, axis=1)

    def _evaluate(self, space: SampleSpace):
        k, prm = self.kind, self.params
        if k == "tent":
            R = float(prm.get("R", 1.0))
            d = self._distance(space)
            return np.maximum(1.0 - d / R, 0.0), np.where(d < R, 1.0 / R, 0.0)
        if k == "bump":
            s = float(prm.get("s", 1.0))
            d = self._distance(space)
            v = np.exp(-(d**2) / (2 * s * s))
            return v, d / (s * s) * v
        if k == "coordinate":
            x = space.points[:, int(prm.get("k", 0))]
            if space.kind == "sphere":
                return x.copy(), np.sqrt(np.clip(1.0 - x * x, 0.0, None))
            return x.copy(), np.ones_like(x)
        if k == "smooth_indicator":
            a, eps = float(prm.get("a", 1.0)), float(prm.get("eps", 0.1))
            d = self._distance(space)
            v = np.clip((a + eps - d) / eps, 0.0, 1.0)
            return v, np.where((d > a) & (d < a + eps), 1.0 / eps, 0.0)
        if k == "hermite":
            s = float(prm.get("s", 1.0))
            x = space.points[:, 0]
            e = np.exp(-(x**2) / (2 * s * s))
            return x * e, np.abs(1.0 - x * x / (s * s)) * e
        if k == "user":
            values = np.asarray(prm["values"], dtype=float)
            grad = prm.get("grad")
            return values.copy(), None if grad is None else np.asarray(grad, dtype=float)
        raise InvalidParams(f"unknown test function kind {k!r}")


def _as_field(f, space: SampleSpace) -> Field:
    if isinstance(f, TestFunction):
        return f.field(space)
    if isinstance(f, Field):
        return f
    return Field(np.asarray(f, dtype=float))


def _label(f) -> str:
    return f.label if isinstance(f, TestFunction) else "field"


def _lp(space: SampleSpace, values: np.ndarray, p: float) -> float:
    a = np.abs(values)
    if math.isinf(p):
        return float(a.max(initial=0.0))
    return float(np.sum(space.weights * a**p) ** (1.0 / p))


def _check_normalized(space: SampleSpace, f: Field) -> None:
    """The uncertainty theorems need m(f) = 0 or mean 0, or compact support."""
    v = f.values
    if space.infinite:
        if not check_support(space, f):
            raise InvalidParams("on infinite-measure spaces f must vanish on the truncation layer")
        return
    scale_inf = float(np.abs(v).max(initial=0.0))
    scale_1 = float(np.sum(space.weights * np.abs(v)))
    if scale_inf == 0:
        return
    med_ok = abs(median(v, space)) <= 1e-9 * scale_inf
    mean_ok = abs(float(np.sum(space.weights * v))) <= 1e-9 * scale_1
    if not (med_ok or mean_ok):
        raise InvalidParams("f must have median zero or mean zero")


# ----------------------------------------------------------------------------
# Poincare and coarea


def local_poincare(space: SampleSpace, profile: Profile, f, A, tolerance: float = DEFAULT_TOLERANCE):
    """int_A |f - m(f)| <= Phi(mu(A)) int |grad f|."""
    if space.infinite:
        raise InfiniteMeasureSpace("the localized Poincare inequality needs finite measure")
    fld = _as_field(f, space)
    mask = as_mask(space, A)
    grad = gradient_modulus(space, fld).values
    m = median(fld.values, space)
    w = space.weights
    lhs = float(np.sum(w[mask] * np.abs(fld.values[mask] - m)))
    mu_a = float(np.sum(w[mask]))
    const = float(phi(profile, min(mu_a, profile.domain_end))) if mu_a > 0 else 0.0
    grad_l1 = float(np.sum(w * grad))
    return InequalityReport(
        "local_poincare", lhs, const * grad_l1, const, tolerance,
        provenance=provenance(space, profile, tolerance),
        details={"function": _label(f), "median": m, "measure_A": mu_a, "grad_l1": grad_l1},
    )


def _level_integral(space: SampleSpace, profile: Profile, values: np.ndarray, lo: float, hi: float,
                    levels: int) -> float:
    """int_lo^hi I(mu{values > s}) ds by the trapezoid rule on ``levels`` points."""
    if hi <= lo:
        return 0.0
    order = np.argsort(values, kind="stable")
    sorted_v = values[order]
    tail = np.concatenate([np.cumsum(space.weights[order][::-1])[::-1], [0.0]])
    s = np.linspace(lo, hi, levels)
    mu = tail[np.searchsorted(sorted_v, s, side="right")]
    inside = (mu > 0) & (mu < profile.domain_end * (1 - 1e-12))
    iso = np.zeros_like(s)
    iso[inside] = profile_value(profile, mu[inside])
    return float(np.trapezoid(iso, s))


def coarea_check(space: SampleSpace, profile: Profile, f, levels: int = COAREA_LEVELS,
                 tolerance: float = DEFAULT_TOLERANCE):
    """int I(mu{f > s}) ds <= int |grad f| dmu."""
    fld = _as_field(f, space)
    grad = gradient_modulus(space, fld).values
    rhs = float(np.sum(space.weights * grad))
    v = fld.values
    if space.infinite:
        if not check_support(space, fld):
            raise InvalidParams("on infinite-measure spaces f must vanish on the truncation layer")
        pos, neg = np.maximum(v, 0.0), np.maximum(-v, 0.0)
        lhs = (_level_integral(space, profile, pos, 0.0, float(pos.max()), levels)
               + _level_integral(space, profile, neg, 0.0, float(neg.max()), levels))
    else:
        lhs = _level_integral(space, profile, v, float(v.min()), float(v.max()), levels)
    return InequalityReport(
        "coarea", lhs, rhs, None, tolerance,
        provenance=provenance(space, profile, tolerance),
        details={"function": _label(f), "levels": levels},
    )


# ----------------------------------------------------------------------------
# uncertainty


class _UncertaintyNorms(NamedTuple):
    f: float
    grad: float
    weighted: float


def _uncertainty_norms(space, w, fld: Field, p: float, alpha: float) -> _UncertaintyNorms:
    wv = w.values if isinstance(w, Field) else np.asarray(w, dtype=float)
    grad = gradient_modulus(space, fld).values
    return _UncertaintyNorms(_lp(space, fld.values, p), _lp(space, grad, p),
                             _lp(space, wv**alpha * fld.values, p))


def uncertainty_constant(C: float, p: float) -> float:
    """K in ||f||_p <= K r ||grad f||_p + 2 r^-alpha ||w^alpha f||_p."""
    return 2.0 * C if p == 1 else C * (2.0 * p + 1.0)


def _resolve_C(space, profile, w, C):
    if C is None:
        C = isoperimetric_constant(w, space, profile)
    if not math.isfinite(C):
        raise ConditionViolated("the weight is not isoperimetric (C(w) is infinite)")
    return float(C)


def uncertainty_additive(space: SampleSpace, profile: Profile, w, f, p: float = 1.0, alpha: float = 1.0,
                         r_grid: Sequence[float] | None = None, C: float | None = None,
                         tolerance: float = DEFAULT_TOLERANCE):
    """||f||_p <= K r ||grad f||_p + 2 r^-alpha ||w^alpha f||_p at every r of the grid.

    K = 2 C(w) for p = 1 and C(w)(2p + 1) for p > 1.  The reported rhs is the
    smallest one over the grid, i.e. the tightest point of the curve.
    """
    if p < 1 or alpha <= 0:
        raise InvalidParams("need p >= 1 and alpha > 0")
    fld = _as_field(f, space)
    _check_normalized(space, fld)
    C = _resolve_C(space, profile, w, C)
    nr = _uncertainty_norms(space, w, fld, p, alpha)
    K = uncertainty_constant(C, p)
    if r_grid is None:
        if nr.grad > 0 and nr.weighted > 0:
            r_bal = (nr.weighted / (K * nr.grad)) ** (1.0 / (1.0 + alpha))
            r_grid = np.geomspace(r_bal / 100, r_bal * 100, 256)
        else:
            r_grid = np.geomspace(1e-3, 1e3, 256)
    rows = []
    for r in np.asarray(r_grid, dtype=float):
        rhs = K * r * nr.grad + 2.0 * r ** (-alpha) * nr.weighted
        rows.append({"r": float(r), "lhs": nr.f, "rhs": float(rhs), "ratio": _ratio(nr.f, rhs)})
    best = min(rows, key=lambda row: row["rhs"])
    return InequalityReport(
        "uncertainty_additive", nr.f, best["rhs"], K, tolerance, witnesses=rows,
        provenance=provenance(space, profile, tolerance),
        details={"function": _label(f), "p": p, "alpha": alpha, "C_w": C,
                 "norm_f": nr.f, "norm_grad": nr.grad, "norm_weighted": nr.weighted},
    )


def uncertainty_multiplicative(space: SampleSpace, profile: Profile, w, f, p: float = 1.0,
                               alpha: float = 1.0, C: float | None = None,
                               tolerance: float = DEFAULT_TOLERANCE):
    """||f|| <= K^{a/(a+1)} ||grad f||^{a/(a+1)} ||w^a f||^{1/(a+1)}.

    Also records the additive bound at the balancing radius (which equals
    three times the multiplicative rhs) and its true minimum over r.
    """
    if p < 1 or alpha <= 0:
        raise InvalidParams("need p >= 1 and alpha > 0")
    fld = _as_field(f, space)
    _check_normalized(space, fld)
    C = _resolve_C(space, profile, w, C)
    nr = _uncertainty_norms(space, w, fld, p, alpha)
    K = uncertainty_constant(C, p)
    e = alpha / (alpha + 1.0)
    rhs = K**e * nr.grad**e * nr.weighted ** (1.0 - e)
    details = {"function": _label(f), "p": p, "alpha": alpha, "C_w": C,
               "norm_f": nr.f, "norm_grad": nr.grad, "norm_weighted": nr.weighted}
    if nr.grad > 0 and nr.weighted > 0:
        r_bal = (nr.weighted / (K * nr.grad)) ** (1.0 / (1.0 + alpha))
        r_opt = (2.0 * alpha * nr.weighted / (K * nr.grad)) ** (1.0 / (1.0 + alpha))
        details.update(
            balancing_r=r_bal,
            additive_at_balance=K * r_bal * nr.grad + 2.0 * r_bal ** (-alpha) * nr.weighted,
            optimal_r=r_opt,
            additive_min=K * r_opt * nr.grad + 2.0 * r_opt ** (-alpha) * nr.weighted,
        )
    return InequalityReport("uncertainty_multiplicative", nr.f, float(rhs), K, tolerance,
                            provenance=provenance(space, profile, tolerance), details=details)


# ----------------------------------------------------------------------------
# the isoperimetric Hardy operator


def _hardy_upper(sf: StepFunction, profile: Profile) -> float:
    return profile.half if profile.finite else sf.domain_end


def hardy_operator(sf: StepFunction, profile: Profile, t):
    """Q f(t) = (I(t)/t) int_t^U f(s)/I(s) ds, U = mu/2 (or the end of f's domain).

    Exact per interval through the primitive of 1/I; vectorized in t and
    equal to 0 for t >= U.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise OutOfDomain("the Hardy operator is evaluated at t > 0")
    U = _hardy_upper(sf, profile)
    if profile.finite and np.any(t > U * (1 + 1e-12)):
        raise OutOfDomain("t must not exceed mu(Omega)/2")
    keep = sf.breakpoints < U
    left = sf.breakpoints[keep]
    right = np.minimum(np.append(left[1:], min(sf.domain_end, U)), U)
    vals = sf.values[keep]
    floor = PRIMITIVE_FLOOR * (profile.domain_end if profile.finite else 1.0)
    g_left = profile.primitive(np.maximum(left, floor))
    g_right = profile.primitive(right)
    pieces = vals * (g_right - g_left)
    suffix = np.concatenate([np.cumsum(pieces[::-1])[::-1][1:], [0.0]])
    inside = t < right[-1]
    tc = np.where(inside, t, 0.5 * right[-1])
    k = np.clip(np.searchsorted(left, tc, side="right") - 1, 0, len(left) - 1)
    integral = suffix[k] + vals[k] * (g_right[k] - profile.primitive(tc))
    out = np.where(inside, profile_value(profile, tc) / tc * integral, 0.0)
    return float(out) if out.ndim == 0 else out


def hardy_norm_closed_form(profile: Profile, norm: RiNormSpec) -> float | None:
    """||Q||_{Lp -> Lp} = 1/(1/p - (1 - gamma)) for I(t) = a t^gamma on (0, inf).

    Returns None when no closed form applies, inf when the operator is
    unbounded (p >= 1/(1 - gamma)).
    """
    pw = profile.power
    if pw is None or profile.finite or norm.family != "Lp":
        return None
    gamma = pw[1]
    p = norm.p
    if math.isinf(p) or 1.0 / p <= 1.0 - gamma:
        return math.inf
    return 1.0 / (1.0 / p - (1.0 - gamma))


def hardy_transform_norm(sf: StepFunction, profile: Profile, norm: RiNormSpec) -> float:
    """||Q f||_{X bar} by quadrature on the step structure of f."""
    U = _hardy_upper(sf, profile)
    end = min(U, sf.domain_end) if profile.finite else sf.domain_end
    edges = np.append(sf.breakpoints[(sf.breakpoints > 0) & (sf.breakpoints < end)], end)
    return ri_norm_of_function(lambda t: hardy_operator(sf, profile, np.minimum(t, U)), norm, edges)


def default_probes(profile: Profile, domain_end: float = 1.0, count: int = 24) -> list[StepFunction]:
    """Indicators chi_(0,a) and two power-type staircases."""
    U = profile.half if profile.finite else domain_end
    end = profile.domain_end if profile.finite else domain_end
    probes = [StepFunction(np.array([0.0]), np.array([1.0]), a) if a == end
              else StepFunction(np.array([0.0, a]), np.array([1.0, 0.0]), end)
              for a in np.geomspace(U * 1e-4, U, count)]
    b = np.concatenate([[0.0], np.geomspace(U * 1e-6, U, 200)[:-1]])
    for beta in (0.25, 0.5):
        vals = (U / np.geomspace(U * 1e-6, U, 200)) ** beta
        probes.append(StepFunction(b, vals, U if not profile.finite else U))
    return probes


class OperatorNorm(NamedTuple):
    value: float
    closed_form: bool
    degenerate: bool


def hardy_operator_norm_estimate(profile: Profile, norm: RiNormSpec,
                                 probes: Sequence[StepFunction] | None = None,
                                 use_closed_form: bool = True, domain_end: float = 1.0) -> OperatorNorm:
    """||Q||_{X bar}: closed form for power profiles on Lp, else max over probes of ||Qf||/||f||.

    A probe estimate is a lower bound of the true operator norm.
    """
    if use_closed_form:
        exact = hardy_norm_closed_form(profile, norm)
        if exact is not None:
            return OperatorNorm(exact, True, False)
    probes = default_probes(profile, domain_end) if probes is None else list(probes)
    best = 0.0
    for sf in probes:
        denom = ri_norm(sf, norm)
        if denom > 0 and math.isfinite(denom):
            best = max(best, hardy_transform_norm(sf, profile, norm) / denom)
    return OperatorNorm(best, False, best == 0.0)


# ----------------------------------------------------------------------------
# Sobolev and Strichartz


def _iso_quotient(profile: Profile, t):
    t = np.asarray(t, dtype=float)
    return profile_value(profile, t) / t


def _sobolev_parts(space, profile, norm, fld: Field, q_norm: OperatorNorm | None):
    fs = decreasing_rearrangement(fld, space)
    gs = decreasing_rearrangement(gradient_modulus(space, fld), space)
    U = profile.half if profile.finite else fs.domain_end
    edges = np.append(fs.breakpoints[(fs.breakpoints > 0) & (fs.breakpoints < U)], U)
    lhs = ri_norm_of_function(lambda t: fs(t) * _iso_quotient(profile, np.minimum(t, U)), norm, edges)
    if q_norm is None:
        q_norm = hardy_operator_norm_estimate(profile, norm, domain_end=fs.domain_end)
    grad_norm = ri_norm(gs, norm)
    parts = {"operator_norm": q_norm.value, "operator_norm_closed_form": q_norm.closed_form,
             "grad_norm": grad_norm, "lhs": lhs, "fs": fs}
    rhs = q_norm.value * grad_norm
    if profile.finite:
        c = ri_norm_of_function(lambda t: _iso_quotient(profile, t), norm, [U])
        l1 = _lp(space, fld.values, 1.0)
        rhs += 2.0 * c / profile.domain_end * l1
        parts.update(c_XI=c, l1=l1)
    parts["rhs"] = rhs
    return parts


def ri_sobolev(space: SampleSpace, profile: Profile, norm: RiNormSpec, f,
               q_norm: OperatorNorm | None = None, tolerance: float = DEFAULT_TOLERANCE):
    """||f* I(t)/t chi_(0,mu/2)|| <= ||Q|| ||grad f|| + (2 c_{X,I}/mu) ||f||_1.

    On infinite-measure spaces the L1 term is absent and f must have
    compact support.
    """
    fld = _as_field(f, space)
    if space.infinite and not check_support(space, fld):
        raise InvalidParams("on infinite-measure spaces f must vanish on the truncation layer")
    parts = _sobolev_parts(space, profile, norm, fld, q_norm)
    details = {k: v for k, v in parts.items() if k not in ("fs", "lhs", "rhs")}
    details.update(function=_label(f), norm=norm.label())
    return InequalityReport("ri_sobolev", parts["lhs"], parts["rhs"], parts["operator_norm"], tolerance,
                            provenance=provenance(space, profile, tolerance), details=details)


def strichartz_check(space: SampleSpace, profile: Profile, norm: RiNormSpec, f, g,
                     q_norm: OperatorNorm | None = None, tolerance: float = DEFAULT_TOLERANCE):
    """||fg|| <= ||g||_{M(Phi)} ||Q|| ||grad f|| (+ the L1 term and a factor 2 in finite measure).

    Links: Hardy-Littlewood ||fg|| <= ||f* g*|| (exact on step data),
    extraction ||f* g*|| <= ||g||_M ||f*/Phi||, and the Sobolev step
    ||f*/Phi|| <= factor * (Sobolev rhs).
    """
    fld = _as_field(f, space)
    gv = g.values if isinstance(g, Field) else np.asarray(g, dtype=float)
    if space.infinite and not check_support(space, fld):
        raise InvalidParams("on infinite-measure spaces f must vanish on the truncation layer")
    fs = decreasing_rearrangement(fld, space)
    gs = decreasing_rearrangement(gv, space)
    fgs = decreasing_rearrangement(fld.values * gv, space)
    g_m = ri_norm(gs, RiNormSpec.marcinkiewicz(phi_handle(profile), t_min=space.resolution_floor))
    if not math.isfinite(g_m):
        raise ConditionViolated("g has infinite Marcinkiewicz norm")
    lhs = ri_norm(fgs, norm)
    hl_rhs = ri_norm(fs.multiply(gs), norm)
    phi_fn = phi_handle(profile)
    edges = fs.edges[1:]
    f_over_phi = ri_norm_of_function(lambda t: fs(t) / phi_fn(t), norm, edges)
    parts = _sobolev_parts(space, profile, norm, fld, q_norm)
    factor = 2.0 if profile.finite else 1.0
    composite = g_m * factor * parts["rhs"]
    checks = [
        _check("hardy_littlewood", lhs, hl_rhs, EXACT_TOLERANCE),
        _check("marcinkiewicz_extraction", hl_rhs, g_m * f_over_phi, tolerance),
        _check("sobolev", f_over_phi, factor * parts["rhs"], tolerance),
    ]
    return InequalityReport(
        "strichartz", lhs, composite, g_m * parts["operator_norm"], tolerance, checks=checks,
        provenance=provenance(space, profile, tolerance),
        details={"function": _label(f), "norm": norm.label(), "g_marcinkiewicz": g_m,
                 "operator_norm": parts["operator_norm"],
                 "operator_norm_closed_form": parts["operator_norm_closed_form"],
                 "grad_norm": parts["grad_norm"], "factor": factor},
    )


def brezis_wainger_report(space: SampleSpace, f, g):
    """Empirical ||fg||_n / (||g||_{L log(n, inf)} ||grad f||_n); no pass/fail."""
    if space.kind != "euclidean_box":
        raise UnsupportedKind("the log-Lorentz comparison is set on Euclidean domains")
    n = space.dim
    if n < 2:
        raise InvalidParams("dimension must be >= 2")
    fld = _as_field(f, space)
    gv = g.values if isinstance(g, Field) else np.asarray(g, dtype=float)
    big = float(np.sum(space.weights))
    g_norm = ri_norm(decreasing_rearrangement(gv, space), RiNormSpec.log_lorentz(n, big))
    lhs = _lp(space, fld.values * gv, n)
    grad_n = _lp(space, gradient_modulus(space, fld).values, n)
    return InequalityReport("brezis_wainger", lhs, g_norm * grad_n, None, 0.0, report_only=True,
                            provenance=provenance(space, None, 0.0),
                            details={"function": _label(f), "g_norm": g_norm, "grad_norm": grad_n})


def brezis_wainger_sweep(space: SampleSpace, functions, g) -> float:
    """Largest empirical ratio over a family: a lower bound for the constant c_n."""
    return max((brezis_wainger_report(space, f, g).ratio for f in functions), default=0.0)


def transference_check(profile1: Profile, profile2: Profile, space1: SampleSpace, w, f,
                       p: float = 1.0, alpha: float = 1.0, probe_grid=None,
                       tolerance: float = DEFAULT_TOLERANCE):
    """If I1 >= I2: ||1/w||_{M(Phi1)} <= ||1/w||_{M(Phi2)}, and uncertainty holds with C from Phi2."""
    end = min(profile1.domain_end, profile2.domain_end)
    if probe_grid is None:
        top = end if math.isfinite(end) else 1e3
        probe_grid = np.linspace(top / 1024, top * (1 - 1 / 1024), 512)
    t = np.asarray(probe_grid, dtype=float)
    if np.any(profile_value(profile1, t) < profile_value(profile2, t) * (1 - 1e-12)):
        raise ProfilesNotOrdered("I1 >= I2 fails on the probe grid")
    n1 = marcinkiewicz_weight_norm(w, space1, profile1)
    n2 = marcinkiewicz_weight_norm(w, space1, profile2)
    C2 = isoperimetric_constant(w, space1, profile2)
    mult = uncertainty_multiplicative(space1, profile2, w, f, p, alpha, C=C2, tolerance=tolerance)
    checks = [_check("norm_monotonicity", n1, n2, 1e-12),
              _check("uncertainty_phi2", mult.lhs, mult.rhs, tolerance)]
    return InequalityReport(
        "transference", mult.lhs, mult.rhs, mult.constant_used, tolerance, checks=checks,
        provenance=provenance(space1, profile2, tolerance),
        details={"function": _label(f), "norm_phi1": n1, "norm_phi2": n2, "C_phi2": C2,
                 "profile1": profile1.label, "profile2": profile2.label},
    )
