"""Distribution functions, decreasing rearrangements and r.i. norms.

All norms are evaluated in closed form on the interval structure of a step
function; nothing here samples or does quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InfiniteMeasureSpace, InvalidParams, OutOfDomain, UnsupportedNorm
from .spaces import Field, SampleSpace


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function on [0, domain_end).

    Interval ``i`` is ``[breakpoints[i], breakpoints[i+1])``, the last one
    ending at ``domain_end`` (which may be ``inf``).  The function is 0 past
    ``domain_end``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    domain_end: float
    monotone: bool = True

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or b.shape != v.shape or len(b) == 0:
            raise InvalidParams("breakpoints and values must be 1-d and aligned")
        if b[0] != 0.0 or np.any(np.diff(b) <= 0):
            raise InvalidParams("breakpoints must start at 0 and increase strictly")
        if b[-1] >= self.domain_end:
            raise InvalidParams("last breakpoint must lie before domain_end")
        if self.monotone and np.any(np.diff(v) > 0):
            raise InvalidParams("values of a nonincreasing step function increase")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "domain_end", float(self.domain_end))

    @property
    def edges(self) -> np.ndarray:
        return np.append(self.breakpoints, self.domain_end)

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.edges)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        i = np.searchsorted(self.breakpoints, t, side="right") - 1
        inside = (t >= 0) & (t < self.domain_end)
        out = np.where(inside, self.values[np.clip(i, 0, None)], 0.0)
        return float(out) if out.ndim == 0 else out

    def left_limit(self, t):
        """f(t-) for t in (0, domain_end]; f(0) at t = 0."""
        t = np.asarray(t, dtype=float)
        i = np.clip(np.searchsorted(self.breakpoints, t, side="left") - 1, 0, None)
        inside = (t >= 0) & (t <= self.domain_end)
        out = np.where(inside, self.values[i], 0.0)
        return float(out) if out.ndim == 0 else out

    def integral(self, t):
        """int_0^t of the function, exact."""
        t = np.asarray(t, dtype=float)
        edges = self.edges
        finite = np.where(np.isfinite(self.lengths), self.lengths, 0.0)
        cum = np.concatenate([[0.0], np.cumsum(self.values * finite)])
        tc = np.clip(t, 0.0, self.domain_end)
        i = np.clip(np.searchsorted(edges, tc, side="right") - 1, 0, len(self.values) - 1)
        out = cum[i] + self.values[i] * (tc - edges[i])
        return float(out) if out.ndim == 0 else out

    def total(self) -> float:
        return float(self.integral(self.domain_end)) if math.isfinite(self.domain_end) else math.inf

    def truncate(self, end: float) -> "StepFunction":
        """Restriction to [0, end)."""
        if end <= 0:
            raise InvalidParams("truncation point must be positive")
        if end >= self.domain_end:
            return self
        keep = self.breakpoints < end
        return StepFunction(self.breakpoints[keep], self.values[keep], end, self.monotone)

    def multiply(self, other: "StepFunction") -> "StepFunction":
        """Pointwise product on the merged interval structure."""
        end = min(self.domain_end, other.domain_end)
        b = np.union1d(self.breakpoints, other.breakpoints)
        b = b[b < end]
        return StepFunction(b, self(b) * other(b), end, self.monotone and other.monotone)


# ----------------------------------------------------------------------------


def _values_weights(f, space: SampleSpace | None):
    values = f.values if isinstance(f, Field) else np.asarray(f, dtype=float)
    if space is None:
        raise InvalidParams("a space (or weights) is required")
    weights = space.weights if isinstance(space, SampleSpace) else np.asarray(space, dtype=float)
    if values.shape != weights.shape:
        raise InvalidParams("field does not align with space")
    return values, weights


def distribution_function(f, space) -> StepFunction:
    """mu_f(t) = mu{|f| > t} as a nonincreasing step function of t >= 0."""
    values, weights = _values_weights(f, space)
    a = np.abs(values)
    levels, inverse = np.unique(a, return_inverse=True)
    mass = np.bincount(inverse, weights=weights, minlength=len(levels))
    # mass strictly above levels[j]: suffix sums in a fixed order
    above = np.concatenate([np.cumsum(mass[::-1])[::-1][1:], [0.0]])
    if levels[0] > 0:
        breakpoints = np.concatenate([[0.0], levels])
        vals = np.concatenate([[above[0] + mass[0]], above])
    else:
        breakpoints, vals = levels, above
    return StepFunction(breakpoints, vals, math.inf)


def decreasing_rearrangement(f, space) -> StepFunction:
    """f*(s) = inf{t : mu_f(t) <= s}, built by sorting |f| and accumulating mass."""
    values, weights = _values_weights(f, space)
    a = np.abs(values)
    levels, inverse = np.unique(a, return_inverse=True)
    mass = np.bincount(inverse, weights=weights, minlength=len(levels))
    levels, mass = levels[::-1], mass[::-1]
    cum = np.cumsum(mass)
    keep = mass > 0
    levels, cum_start = levels[keep], np.concatenate([[0.0], cum[:-1]])[keep]
    return StepFunction(cum_start, levels, float(cum[-1]))


def maximal_average(sf: StepFunction) -> Callable:
    """t -> f**(t) = (1/t) int_0^t f*, exact."""

    def f_star_star(t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr <= 0):
            raise OutOfDomain("maximal average is defined for t > 0")
        out = np.asarray(sf.integral(t_arr)) / t_arr
        return float(out) if out.ndim == 0 else out

    return f_star_star


def median(f, space) -> float:
    """Smallest attained value m with mu{f >= m} and mu{f <= m} both >= mu/2."""
    if isinstance(space, SampleSpace) and space.infinite:
        raise InfiniteMeasureSpace("medians need a finite-measure space")
    values, weights = _values_weights(f, space)
    levels, inverse = np.unique(values, return_inverse=True)
    mass = np.bincount(inverse, weights=weights, minlength=len(levels))
    total = float(np.sum(weights))
    below = np.cumsum(mass)
    above = np.cumsum(mass[::-1])[::-1]
    half = 0.5 * total * (1 - 1e-12)
    ok = (below >= half) & (above >= half)
    return float(levels[np.argmax(ok)])


# ----------------------------------------------------------------------------
# rearrangement-invariant norms


@dataclass(frozen=True)
class RiNormSpec:
    """Which r.i. norm to evaluate on f*.

    ``family`` is one of ``Lp``, ``Lorentz``, ``Marcinkiewicz``,
    ``LogLorentz``.  Marcinkiewicz carries its fundamental function ``phi``
    (vectorized) and an optional ``critical_points(lo, hi)`` returning
    interior maxima candidates of ``phi`` on an interval.  ``t_min`` restricts
    weighted sups to t >= t_min (grid resolution floor; 0 = exact sup).
    """

    family: str
    p: float = 1.0
    q: float = 1.0
    phi: Callable | None = None
    critical_points: Callable | None = None
    n: float = 2.0
    domain_measure: float = 1.0
    t_min: float = 0.0

    @classmethod
    def lp(cls, p: float) -> "RiNormSpec":
        if not p >= 1:
            raise InvalidParams("p must lie in [1, inf]")
        return cls("Lp", p=p, q=p)

    @classmethod
    def lorentz(cls, p: float, q: float) -> "RiNormSpec":
        if not (p >= 1 and q >= 1):
            raise InvalidParams("Lorentz indices must lie in [1, inf]")
        return cls("Lorentz", p=p, q=q)

    @classmethod
    def marcinkiewicz(cls, phi: Callable, t_min: float = 0.0, critical_points=None) -> "RiNormSpec":
        return cls("Marcinkiewicz", phi=phi, t_min=t_min, critical_points=critical_points)

    @classmethod
    def log_lorentz(cls, n: float, domain_measure: float) -> "RiNormSpec":
        return cls("LogLorentz", n=n, domain_measure=domain_measure)

    def label(self) -> str:
        if self.family == "Lp":
            return f"L{self.p:g}"
        if self.family == "Lorentz":
            return f"L({self.p:g},{self.q:g})"
        if self.family == "LogLorentz":
            return f"Llog({self.n:g},inf)"
        return "M(Phi)"


def _weighted_sup(sf: StepFunction, weight: Callable, crit: Callable | None, t_min: float) -> float:
    """sup_{t >= t_min} f*(t) weight(t) over the step structure.

    Candidates per interval are its right end (as a limit), its left end
    (clipped to t_min) and any interior critical points of the weight.
    """
    edges = sf.edges
    lo = np.maximum(edges[:-1], t_min)
    hi = edges[1:]
    live = (sf.values != 0) & (hi > lo)
    if not live.any():
        return 0.0
    v, lo, hi = sf.values[live], lo[live], hi[live]
    if not np.isfinite(hi[-1]) and float(np.asarray(weight(np.array([1e300])))[0]) > 0:
        return math.inf
    vals, pts = [v[np.isfinite(hi)]], [hi[np.isfinite(hi)]]
    pos = lo > 0
    vals.append(v[pos])
    pts.append(lo[pos])
    if crit is not None:
        for vi, a, b in zip(v, lo, hi):
            inner = [c for c in crit(a, b) if a < c < b]
            vals.append(np.full(len(inner), vi))
            pts.append(np.asarray(inner, dtype=float))
    vals, pts = np.concatenate(vals), np.concatenate(pts)
    if len(pts) == 0:
        return 0.0
    return float(np.max(vals * np.asarray(weight(pts), dtype=float)))


def _log_lorentz_weight(n: float, big: float):
    def weight(t):
        t = np.asarray(t, dtype=float)
        return t ** (1.0 / n) * (1.0 + np.log(big / t))

    def crit(lo, hi):
        return [big * math.exp(1.0 - n)]

    return weight, crit


def ri_norm(sf: StepFunction, norm: RiNormSpec) -> float:
    """||f||_X = ||f*||_{X bar} for f* given as a nonincreasing step function."""
    if not sf.monotone:
        raise InvalidParams("r.i. norms are evaluated on rearrangements")
    v = sf.values
    edges = sf.edges
    if norm.family == "Lp":
        p = norm.p
        live = sf.lengths > 0
        if math.isinf(p):
            return float(np.max(v[live], initial=0.0))
        if not math.isfinite(sf.domain_end) and v[-1] > 0:
            return math.inf
        lengths = np.where(np.isfinite(sf.lengths), sf.lengths, 0.0)
        return float(np.sum(v**p * lengths) ** (1.0 / p))
    if norm.family == "Lorentz":
        p, q = norm.p, norm.q
        if math.isinf(p) and math.isinf(q):
            raise UnsupportedNorm("Lorentz(inf, inf) is not supported")
        if math.isinf(p):
            return 0.0 if not np.any(v > 0) else math.inf
        if math.isinf(q):
            return _weighted_sup(sf, lambda t: t ** (1.0 / p), None, norm.t_min)
        if not math.isfinite(sf.domain_end) and v[-1] > 0:
            return math.inf
        pieces = edges[1:] ** (q / p) - edges[:-1] ** (q / p)
        return float((p / q * np.sum(v**q * pieces)) ** (1.0 / q))
    if norm.family == "Marcinkiewicz":
        if norm.phi is None:
            raise InvalidParams("Marcinkiewicz norm needs a fundamental function")
        return _weighted_sup(sf, norm.phi, norm.critical_points, norm.t_min)
    if norm.family == "LogLorentz":
        weight, crit = _log_lorentz_weight(norm.n, norm.domain_measure)
        return _weighted_sup(sf.truncate(norm.domain_measure), weight, crit, norm.t_min)
    raise UnsupportedNorm(f"unknown norm family {norm.family!r}")


def product_partial_integral(u, v, space, t: float) -> tuple[float, float]:
    """(int_0^t (uv)*, int_0^t u* v*): the two sides of the Hardy-Littlewood inequality."""
    uu, _ = _values_weights(u, space)
    vv, _ = _values_weights(v, space)
    uv = decreasing_rearrangement(uu * vv, space)
    us = decreasing_rearrangement(uu, space)
    vs = decreasing_rearrangement(vv, space)
    return float(uv.integral(t)), float(us.multiply(vs).integral(t))


# ----------------------------------------------------------------------------
# norms of nonincreasing functions that are not step functions

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def quadrature_nodes(edges, max_ratio: float = 2.0, depth: int = 50):
    """Gauss-Legendre nodes and weights on [0, edges[-1]].

    Cells between consecutive edges are split geometrically until
    hi/lo <= max_ratio, which keeps power-type singularities at 0 resolved;
    the first cell [0, e1] is replaced by dyadic cells down to e1 2^-depth.
    """
    e = np.unique(np.asarray(edges, dtype=float))
    e = e[e > 0]
    if len(e) == 0:
        raise InvalidParams("need a positive right endpoint")
    cuts = [e[0] * 2.0 ** -np.arange(depth, 0, -1)]
    lo = e[0]
    for hi in e[1:]:
        k = max(1, int(math.ceil(math.log(hi / lo) / math.log(max_ratio))))
        cuts.append(np.geomspace(lo, hi, k + 1)[1:])
        lo = hi
    pts = np.concatenate([[e[0] * 2.0**-depth], *cuts[:1], [e[0]], *cuts[1:]])
    pts = np.unique(pts)
    a, b = pts[:-1], pts[1:]
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, None] + half[:, None] * _GL_NODES[None, :]
    w = half[:, None] * _GL_WEIGHTS[None, :]
    return t.ravel(), w.ravel()


def ri_norm_of_function(fn: Callable, norm: RiNormSpec, edges) -> float:
    """||h||_{X bar} for a nonincreasing h >= 0 vanishing past edges[-1].

    ``edges`` lists the points where h may jump or kink.  Integral norms use
    Gauss-Legendre quadrature (the contribution of (0, e1 2^-50) is dropped);
    sup norms are taken over the quadrature nodes and the edges.
    """
    t, w = quadrature_nodes(edges)
    e = np.unique(np.asarray(edges, dtype=float))
    e = e[e > 0]
    h = np.asarray(fn(t), dtype=float)
    if norm.family == "Lp":
        if math.isinf(norm.p):
            return float(np.max(h))
        return float(np.sum(w * h**norm.p) ** (1.0 / norm.p))
    if norm.family == "Lorentz":
        p, q = norm.p, norm.q
        if math.isinf(p):
            raise UnsupportedNorm("Lorentz with p = inf is not supported here")
        if math.isinf(q):
            return float(max(np.max(h * t ** (1 / p)), 0.0))
        return float((np.sum(w * h**q * t ** (q / p - 1.0))) ** (1.0 / q))
    tt = np.concatenate([t, e[:-1] * (1 + 1e-12)])
    hh = np.concatenate([h, np.asarray(fn(e[:-1] * (1 + 1e-12)), dtype=float)])
    keep = tt >= norm.t_min
    tt, hh = tt[keep], hh[keep]
    if norm.family == "Marcinkiewicz":
        return float(np.max(hh * norm.phi(tt), initial=0.0))
    if norm.family == "LogLorentz":
        weight, _ = _log_lorentz_weight(norm.n, norm.domain_measure)
        inside = tt < norm.domain_measure
        return float(np.max(hh[inside] * weight(tt[inside]), initial=0.0))
    raise UnsupportedNorm(f"unknown norm family {norm.family!r}")
