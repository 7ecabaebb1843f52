"""Isoperimetric weights: constants, Marcinkiewicz norms and constructors.

A weight w > 0 is isoperimetric when Phi(mu{w <= r}) <= C r for all r.  The
best C equals the Marcinkiewicz norm of 1/w, and both are computed here from
the same sorted level structure of w, so the two agree up to rounding.

On truncated infinite-measure spaces, level sets that reach the truncation
layer are censored: their measure is an artifact of the box, so they are
excluded and the analysis records that the reported constant is a lower
bound for the untruncated one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import ConditionViolated, InvalidParams, NonpositiveWeight, UnsupportedKind
from .profiles import Profile, phi, phi_handle
from .rearrange import RiNormSpec, StepFunction, decreasing_rearrangement, ri_norm
from .spaces import (
    Field,
    SampleSpace,
    ball_measure_function,
    log_concave_cdf,
    minkowski_estimate,
    sphere_cap_measure,
    unit_ball_volume,
)

LOG_FILL_POINTS = 256


def _weight_values(w) -> np.ndarray:
    values = w.values if isinstance(w, Field) else np.asarray(w, dtype=float)
    if np.any(~(values > 0)):
        raise NonpositiveWeight("weights must be strictly positive")
    return values


@dataclass(frozen=True)
class _Levels:
    """Sorted distinct values of w with the measure of each closed sublevel set."""

    values: np.ndarray
    closed: np.ndarray  # mu{w <= values[k]}
    strict: np.ndarray  # mu{w < values[k]}
    cutoff: float  # levels >= cutoff touch the truncation layer


def _levels(w, space: SampleSpace) -> _Levels:
    values = _weight_values(w)
    if values.shape != space.weights.shape:
        raise InvalidParams("weight does not align with space")
    levels, inverse = np.unique(values, return_inverse=True)
    mass = np.bincount(inverse, weights=space.weights, minlength=len(levels))
    closed = np.cumsum(mass)
    strict = closed - mass
    cutoff = math.inf
    if space.infinite and space.boundary.any():
        cutoff = float(values[space.boundary].min())
    return _Levels(levels, closed, strict, cutoff)


def default_r_grid(w, space: SampleSpace) -> np.ndarray:
    """All attained weight values plus log-spaced fill points."""
    values = _weight_values(w)
    fill = np.geomspace(values.min(), values.max(), LOG_FILL_POINTS)
    return np.union1d(np.unique(values), fill)


def _sublevel_measures(lv: _Levels, r: np.ndarray, strict: bool) -> np.ndarray:
    if strict:
        k = np.searchsorted(lv.values, r, side="left")
    else:
        k = np.searchsorted(lv.values, r, side="right")
    cum = np.concatenate([[0.0], lv.closed])
    return cum[k]


def isoperimetric_constant(
    w,
    space: SampleSpace,
    profile: Profile,
    r_grid: Sequence[float] | None = None,
    *,
    strict: bool = False,
    floor: float | None = None,
) -> float:
    """C(w) = sup_r Phi(mu{w <= r}) / r over ``r_grid``.

    ``strict`` uses {w < r} instead.  Level sets lighter than ``floor``
    (default: the space's resolution floor) are ignored, and censored level
    sets are skipped; ``inf`` is returned when every nonempty level set is
    censored.
    """
    lv = _levels(w, space)
    r = np.asarray(default_r_grid(w, space) if r_grid is None else r_grid, dtype=float)
    floor = space.resolution_floor if floor is None else floor
    m = _sublevel_measures(lv, r, strict)
    usable = (m > 0) & (m > floor) & (r < lv.cutoff)
    if not usable.any():
        return math.inf if np.any((m > 0) & (r >= lv.cutoff)) else 0.0
    m_end = profile.domain_end
    vals = phi(profile, np.minimum(m[usable], m_end)) / r[usable]
    return float(np.max(vals))


def is_censored(w, space: SampleSpace) -> bool:
    """True when some sublevel set of w reaches the truncation layer."""
    return math.isfinite(_levels(w, space).cutoff)


def reciprocal_rearrangement(w, space: SampleSpace) -> StepFunction:
    """(1/w)*, restricted to uncensored level sets on truncated spaces."""
    values = _weight_values(w)
    lv = _levels(values, space)
    w_star = decreasing_rearrangement(1.0 / values, space)
    if math.isfinite(lv.cutoff):
        t_max = float(_sublevel_measures(lv, np.array([lv.cutoff]), strict=True)[0])
        if t_max <= 0:
            return StepFunction(np.array([0.0]), np.array([math.inf]), 1.0)
        w_star = w_star.truncate(t_max)
    return w_star


def marcinkiewicz_weight_norm(w, space: SampleSpace, profile: Profile, *, floor: float | None = None) -> float:
    """||1/w||_{M(Phi)} = sup_t (1/w)*(t) Phi(t) for t above the resolution floor."""
    w_star = reciprocal_rearrangement(w, space)
    if np.isinf(w_star.values[0]):
        return math.inf
    floor = space.resolution_floor if floor is None else floor
    spec = RiNormSpec.marcinkiewicz(phi_handle(profile), t_min=floor)
    return ri_norm(w_star, spec)


# ----------------------------------------------------------------------------
# construction


@dataclass(frozen=True)
class RadialDescriptor:
    """A function rho on the space and the cumulative measure m(s) = mu{rho <= s}."""

    name: str
    rho: Callable[[SampleSpace], np.ndarray]
    m: Callable[[np.ndarray], np.ndarray]


def half_plane_experimental_measure(rho, k: float = 0.0):
    """The Beta-function expression (1/(k+1)) B((k+1)/2, 1/2) rho^{k+2}.

    Kept for comparison only: at k = 0 it gives pi rho^2, twice the Lebesgue
    measure of the half-disk, so it is not the sublevel measure of |x|.
    """
    rho = np.asarray(rho, dtype=float)
    return special.beta((k + 1) / 2.0, 0.5) / (k + 1) * rho ** (k + 2)


def radial_descriptor(space: SampleSpace, *, experimental_k: float | None = None) -> RadialDescriptor:
    """The measure-preserving map used by each catalog kind.

    euclidean_box: rho = |x|, m = beta_n s^n; half_plane: rho = |x|,
    m = pi s^2 / 2; sphere: rho = latitude, m = measure of {theta_1 <= s};
    log_concave: rho = x_1, m = H.
    """
    kind = space.kind
    if kind == "euclidean_box":
        n, beta = space.dim, unit_ball_volume(space.dim)
        return RadialDescriptor("|x|", lambda sp: np.linalg.norm(sp.points, axis=1),
                                lambda s: beta * np.asarray(s, dtype=float) ** n)
    if kind == "half_plane":
        if experimental_k is not None:
            return RadialDescriptor(f"|x| (beta k={experimental_k:g})",
                                    lambda sp: np.linalg.norm(sp.points, axis=1),
                                    lambda s: half_plane_experimental_measure(s, experimental_k))
        return RadialDescriptor("|x|", lambda sp: np.linalg.norm(sp.points, axis=1),
                                lambda s: 0.5 * math.pi * np.asarray(s, dtype=float) ** 2)
    if kind == "sphere":
        n = space.dim
        return RadialDescriptor("theta_1", lambda sp: sp.latitude,
                                lambda s: sphere_cap_measure(n, np.asarray(s, dtype=float) + math.pi / 2))
    if kind == "log_concave":
        p = space.params["p"]
        return RadialDescriptor("x_1", lambda sp: sp.points[:, 0], lambda s: log_concave_cdf(s, p))
    raise UnsupportedKind(f"no radial descriptor for {kind}")


def construct_weight(
    space: SampleSpace,
    g: StepFunction,
    radial: RadialDescriptor | None = None,
    profile: Profile | None = None,
    *,
    measure: str = "discrete",
) -> Field:
    """w(x) = 1 / g*(m(rho(x))).

    ``measure="discrete"`` realizes the measure-preserving map with the
    space's own sublevel masses, m(x) = mu{rho <= rho(x)}, and evaluates the
    left limit g*(m-); then (1/w)* is g* sampled at atom right ends and
    g* Phi <= 1 carries over to the level sets of w exactly.
    ``measure="analytic"`` uses the closed-form m of the descriptor.

    With a profile, the admissibility condition sup g* Phi < inf is checked
    first.  ``g`` must already be nonincreasing (it plays the role of g*).
    """
    if not g.monotone:
        raise InvalidParams("g must be given by its decreasing rearrangement")
    if measure not in ("discrete", "analytic"):
        raise InvalidParams(f"unknown measure mode {measure!r}")
    radial = radial or radial_descriptor(space)
    if profile is not None:
        norm = ri_norm(g, RiNormSpec.marcinkiewicz(phi_handle(profile)))
        if not math.isfinite(norm):
            raise ConditionViolated("sup g* Phi is infinite")
    rho = np.asarray(radial.rho(space), dtype=float)
    if measure == "discrete":
        levels, inverse = np.unique(rho, return_inverse=True)
        mass = np.bincount(inverse, weights=space.weights, minlength=len(levels))
        m = np.cumsum(mass)[inverse]
        if m.max() > g.domain_end * (1 + 1e-12):
            raise ConditionViolated("g is not defined on the full range of m(rho)")
        gv = np.asarray(g.left_limit(np.minimum(m, g.domain_end)), dtype=float)
    else:
        order = np.argsort(rho, kind="stable")
        m = np.asarray(radial.m(rho), dtype=float)
        if np.any(np.diff(m[order]) < -1e-12):
            raise ConditionViolated("sublevel measure m is not monotone in rho")
        if m.max() >= g.domain_end:
            raise ConditionViolated("g is not defined on the full range of m(rho)")
        gv = np.asarray(g(m), dtype=float)
    if np.any(~(gv > 0)) or np.any(~np.isfinite(gv)):
        raise ConditionViolated("g* must be positive and finite on the space")
    return Field(1.0 / gv)


def prototype_g(profile: Profile, domain_end: float | None = None, points: int = 4096) -> StepFunction:
    """g(t) = I(min{t, mu/2}) / min{t, mu/2} = 1/Phi(t) as a step function.

    On [b_i, b_{i+1}) the value is g(b_{i+1}), so g Phi <= 1 everywhere with
    equality at every right endpoint.  Infinite-measure profiles need an
    explicit ``domain_end`` (the truncated total).
    """
    end = profile.domain_end if domain_end is None else float(domain_end)
    if not math.isfinite(end):
        raise InvalidParams("infinite-measure profiles need a finite domain_end")
    edges = np.concatenate([[0.0], np.geomspace(end * 1e-7, end, points)])
    values = 1.0 / phi(profile, edges[1:])
    # flat stretches of I(t)/t (e.g. exponential tails) must not tick upward by rounding
    values = np.minimum.accumulate(values)
    return StepFunction(edges[:-1], values, end)


# ----------------------------------------------------------------------------
# ball-growth class and the necessary condition


def dt_constant(w, space: SampleSpace, r_grid=None, *, floor: float | None = None) -> float:
    """sup_r mu{w <= r} / Upsilon(r); at most 1 means w satisfies the ball-growth condition."""
    if space.kind not in ("euclidean_box", "sphere"):
        raise UnsupportedKind(f"ball measure is not radius-determined on {space.kind}")
    lv = _levels(w, space)
    r = np.asarray(default_r_grid(w, space) if r_grid is None else r_grid, dtype=float)
    floor = space.resolution_floor if floor is None else floor
    m = _sublevel_measures(lv, r, strict=False)
    usable = (m > 0) & (m > floor) & (r < lv.cutoff)
    if not usable.any():
        return math.inf if np.any((m > 0) & (r >= lv.cutoff)) else 0.0
    ups = np.array([ball_measure_function(space, float(x)) for x in r[usable]])
    return float(np.max(m[usable] / ups))


@dataclass
class NecessaryConditionReport:
    rows: list
    sup_ratio: float
    flagged: list


def necessary_condition_check(w, space: SampleSpace, t_grid) -> NecessaryConditionReport:
    """mu{w <= t} / (t mu+({w <= t})) per t; its sup is the empirical constant c."""
    values = _weight_values(w)
    rows, flagged = [], []
    for t in t_grid:
        mask = values <= t
        m = float(np.sum(space.weights[mask]))
        if m == 0:
            continue
        est = minkowski_estimate(space, mask)
        if est.degenerate or est.value <= 0:
            flagged.append({"t": float(t), "measure": m, "content": est.value})
            continue
        rows.append({"t": float(t), "measure": m, "content": est.value,
                     "ratio": m / (float(t) * est.value)})
    sup_ratio = max((r["ratio"] for r in rows), default=0.0)
    return NecessaryConditionReport(rows, sup_ratio, flagged)


# ----------------------------------------------------------------------------


@dataclass
class WeightAnalysis:
    weight: Field
    C_iso: float
    C_iso_strict: float
    M_norm: float
    level_grid: np.ndarray
    dt_constant: float | None
    censored: bool

    @property
    def lemma_gap(self) -> float:
        """|C_iso - M_norm| / M_norm."""
        if not (math.isfinite(self.C_iso) and math.isfinite(self.M_norm)):
            return 0.0 if self.C_iso == self.M_norm else math.inf
        return abs(self.C_iso - self.M_norm) / self.M_norm if self.M_norm else abs(self.C_iso)

    def to_dict(self) -> dict:
        return {"C_iso": self.C_iso, "C_iso_strict": self.C_iso_strict, "M_norm": self.M_norm,
                "dt_constant": self.dt_constant, "censored": self.censored,
                "levels": int(len(self.level_grid))}


def analyze_weight(w, space: SampleSpace, profile: Profile) -> WeightAnalysis:
    """Constants of w in one pass: C(w), its strict variant, the M(Phi) norm and DT constant."""
    field = w if isinstance(w, Field) else Field(np.asarray(w, dtype=float))
    grid = default_r_grid(field, space)
    dt = dt_constant(field, space, grid) if space.kind in ("euclidean_box", "sphere") else None
    return WeightAnalysis(
        weight=field,
        C_iso=isoperimetric_constant(field, space, profile, grid),
        C_iso_strict=isoperimetric_constant(field, space, profile, grid, strict=True),
        M_norm=marcinkiewicz_weight_norm(field, space, profile),
        level_grid=grid,
        dt_constant=dt,
        censored=is_censored(field, space),
    )
