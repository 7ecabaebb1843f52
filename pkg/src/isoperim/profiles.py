"""Isoperimetric profiles of the catalog spaces and the associated Phi.

Power-law profiles (Euclidean space, the half-plane) are closed form.  Sphere
and log-concave profiles compose an explicit density with the inverse of its
cumulative measure.  Those cumulative measures are regularized incomplete
beta/gamma functions, whose inverses scipy provides, so values are accurate
to roughly machine precision with no interpolation tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import InvalidParams, OutOfDomain, TargetOutOfBracket
from .spaces import (
    SampleSpace,
    ball_measure_function,
    log_concave_density,
    measure_of,
    minkowski_estimate,
    sphere_area,
    sphere_cap_measure,
    unit_ball_volume,
)

PROFILE_KINDS = ("euclidean", "half_plane", "sphere", "log_concave")

# relative clamp applied to t before dividing by I(t) near 0
ENDPOINT_CLAMP = 1e-14
# left end of the tabulated primitive of 1/I, relative to mu(Omega)
PRIMITIVE_FLOOR = 1e-14

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def invert_monotone(fn: Callable, target, bracket, max_iter: int = 200, derivative: Callable | None = None):
    """Solve fn(x) = target on ``bracket = (lo, hi)``.

    ``fn`` must be monotone (either direction) and vectorized; ``target`` may
    be an array, in which case all equations are solved together.  Plain
    bisection runs until the bracket stops shrinking in floating point.  With
    ``derivative``, Newton steps are taken and replaced by bisection whenever
    they leave the current bracket.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise InvalidParams("bracket must satisfy lo < hi")
    target = np.asarray(target, dtype=float)
    f_lo, f_hi = float(np.asarray(fn(np.array(lo)))), float(np.asarray(fn(np.array(hi))))
    increasing = f_hi >= f_lo
    low_val, high_val = (f_lo, f_hi) if increasing else (f_hi, f_lo)
    scale = max(abs(f_lo), abs(f_hi), 1e-300)
    slack = 1e-12 * scale
    if np.any(target < low_val - slack) or np.any(target > high_val + slack):
        raise TargetOutOfBracket(f"target outside [{low_val}, {high_val}]")
    a = np.full(target.shape, lo)
    b = np.full(target.shape, hi)
    x = 0.5 * (a + b)
    active = np.ones(target.shape, dtype=bool)
    for _ in range(max_iter):
        val = np.asarray(fn(x), dtype=float)
        go_right = (val < target) if increasing else (val > target)
        a_new = np.where(go_right, x, a)
        b_new = np.where(go_right, b, x)
        x_new = 0.5 * (a_new + b_new)
        if derivative is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                step = x - (val - target) / np.asarray(derivative(x), dtype=float)
            ok = np.isfinite(step) & (step > a_new) & (step < b_new)
            x_new = np.where(ok, step, x_new)
        converged = (val == target) | (np.abs(x_new - x) <= 4 * np.finfo(float).eps * np.abs(x))
        converged |= (a_new == a) & (b_new == b) & (x_new == x)
        active &= ~converged
        a = np.where(active, a_new, a)
        b = np.where(active, b_new, b)
        x = np.where(active, x_new, x)
        if not active.any():
            break
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True, eq=False)
class Profile:
    """An isoperimetric profile I on (0, domain_end).

    ``power`` is ``(a, gamma)`` when I(t) = a t^gamma (closed-form paths use
    it); ``scale`` multiplies the underlying catalog profile, which is how
    comparison profiles such as 0.9 I are represented.
    """

    kind: str
    params: dict
    domain_end: float
    symmetric: bool
    constants: dict = field(default_factory=dict)
    scale: float = 1.0

    @property
    def finite(self) -> bool:
        return math.isfinite(self.domain_end)

    @property
    def half(self) -> float:
        """mu(Omega)/2, or inf."""
        return 0.5 * self.domain_end

    @property
    def power(self) -> tuple[float, float] | None:
        if self.kind in ("euclidean", "half_plane"):
            a, gamma = self.constants["a"], self.constants["gamma"]
            return self.scale * a, gamma
        return None

    @property
    def label(self) -> str:
        args = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        base = f"{self.kind}({args})"
        return base if self.scale == 1.0 else f"{self.scale:g}*{base}"

    def scaled(self, factor: float) -> "Profile":
        if not factor > 0:
            raise InvalidParams("profile scale factor must be positive")
        return replace(self, scale=self.scale * factor)

    # -- evaluation ---------------------------------------------------------

    def _raw(self, t: np.ndarray) -> np.ndarray:
        """Unscaled I(t) for t already inside the domain (and <= half if symmetric)."""
        c = self.constants
        if self.kind in ("euclidean", "half_plane"):
            return c["a"] * t ** c["gamma"]
        if self.kind == "sphere":
            n = self.params["n"]
            if n == 1:
                return np.full(t.shape, 1.0 / math.pi)
            # cap(r) = I_{sin^2 r}(n/2, 1/2) / 2 for r <= pi/2, inverted in closed form
            sin_sq = special.betaincinv(n / 2.0, 0.5, 2.0 * t)
            return c["density"] * sin_sq ** ((n - 1) / 2.0)
        if self.kind == "log_concave":
            p = self.params["p"]
            # tail(x) = Q(1/p, x^p/p) / 2, inverted in closed form
            x = (p * special.gammainccinv(1.0 / p, 2.0 * t)) ** (1.0 / p)
            return log_concave_density(x, p)
        raise InvalidParams(f"unknown profile kind {self.kind!r}")

    def __call__(self, t):
        return profile_value(self, t)

    def phi(self, t):
        return phi(self, t)

    def primitive(self, s):
        """An antiderivative G of 1/I on (0, domain_end), vectorized.

        Closed form for power profiles; otherwise G(s) = -int_s^{mu/2} du/I
        from a table on a geometric grid plus Gauss-Legendre on the partial
        cell, extended past mu/2 by symmetry.
        """
        s = np.asarray(s, dtype=float)
        pw = self.power
        if pw is not None:
            coef, gamma = pw
            if gamma == 1.0:
                out = np.log(s) / coef
            else:
                out = s ** (1.0 - gamma) / ((1.0 - gamma) * coef)
            return float(out) if out.ndim == 0 else out
        if np.any(~(s > 0)) or np.any(s >= self.domain_end):
            raise OutOfDomain(f"s must lie in (0, {self.domain_end})")
        flip = s > self.half
        u = np.where(flip, self.domain_end - s, s)
        nodes, table = self._primitive_table
        u = np.maximum(u, nodes[0])
        k = np.clip(np.searchsorted(nodes, u, side="right") - 1, 0, len(nodes) - 2)
        right = nodes[k + 1]
        half_w = 0.5 * (right - u)
        pts = (0.5 * (right + u))[:, None] + half_w[:, None] * _GL_X[None, :] if u.ndim else \
            0.5 * (right + u) + half_w * _GL_X
        vals = 1.0 / profile_value(self, np.clip(pts, nodes[0], self.half))
        partial = np.sum(vals * _GL_W, axis=-1) * half_w
        out = table[k + 1] - partial
        out = np.where(flip, -out, out)
        return float(out) if out.ndim == 0 else out

    @cached_property
    def _primitive_table(self):
        nodes = np.geomspace(PRIMITIVE_FLOOR * self.domain_end, self.half, 2049)
        a, b = nodes[:-1], nodes[1:]
        mid, rad = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid[:, None] + rad[:, None] * _GL_X[None, :]
        cells = np.sum(_GL_W / profile_value(self, np.minimum(pts, self.half)), axis=1) * rad
        table = -np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]])
        return nodes, table

    def inverse_integral(self, a, b):
        """int_a^b ds / I(s), vectorized; b = inf is allowed (the integral may diverge)."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if np.any(a > b):
            raise InvalidParams("integration limits out of order")
        top = np.isinf(b)
        gb = self.primitive(np.where(top, a + 1.0, b))
        if np.any(top):
            pw = self.power
            at_inf = math.inf if pw is None or pw[1] < 1 else 0.0
            gb = np.where(top, at_inf, gb)
        out = np.where(a == b, 0.0, gb - self.primitive(a))
        return float(out) if np.ndim(out) == 0 else out


def make_profile(kind: str, **params) -> Profile:
    """Catalog profile by kind.

    ``euclidean`` (n), ``half_plane``, ``sphere`` (n, normalized measure) and
    ``log_concave`` (p in [1, 2], the one-dimensional measure
    Z^{-1} exp(-|x|^p / p) dx).
    """
    if kind == "euclidean":
        n = int(params.get("n", 2))
        if n < 1:
            raise InvalidParams("dimension must be >= 1")
        beta = unit_ball_volume(n)
        consts = {"beta": beta, "a": n * beta ** (1.0 / n), "gamma": 1.0 - 1.0 / n}
        return Profile("euclidean", {"n": n}, math.inf, False, consts)
    if kind == "half_plane":
        beta = unit_ball_volume(2)
        consts = {"beta": beta, "a": math.sqrt(beta), "gamma": 0.5}
        return Profile("half_plane", {}, math.inf, False, consts)
    if kind == "sphere":
        n = int(params.get("n", 2))
        if n < 1:
            raise InvalidParams("dimension must be >= 1")
        consts = {"density": sphere_area(n - 1) / sphere_area(n)}
        return Profile("sphere", {"n": n}, 1.0, True, consts)
    if kind == "log_concave":
        p = float(params.get("p", 2.0))
        if not 1.0 <= p <= 2.0:
            raise InvalidParams(f"p must lie in [1, 2], got {p}")
        consts = {
            "Z": 2.0 * p ** (1.0 / p - 1.0) * math.gamma(1.0 / p),
        }
        return Profile("log_concave", {"p": p}, 1.0, True, consts)
    raise InvalidParams(f"unknown profile kind {kind!r}")


def _as_domain_array(profile: Profile, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)) or np.any(t >= profile.domain_end):
        raise OutOfDomain(f"t must lie in (0, {profile.domain_end})")
    return t


def profile_value(profile: Profile, t):
    """I(t) on (0, domain_end); symmetric profiles use min{t, mu - t}."""
    t = _as_domain_array(profile, t)
    u = np.minimum(t, profile.domain_end - t) if profile.symmetric else t
    out = profile.scale * profile._raw(np.atleast_1d(u)).reshape(u.shape)
    return float(out) if out.ndim == 0 else out


def phi(profile: Profile, t):
    """Phi(t) = min{t, mu/2} / I(min{t, mu/2}), nondecreasing in t."""
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)) or np.any(t > profile.domain_end):
        raise OutOfDomain(f"t must lie in (0, {profile.domain_end}]")
    u = np.minimum(t, profile.half)
    pw = profile.power
    if pw is not None:
        coef, gamma = pw
        out = u ** (1.0 - gamma) / coef
    else:
        u = np.maximum(u, ENDPOINT_CLAMP * profile.domain_end)
        out = u / profile_value(profile, u)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def phi_handle(profile: Profile) -> Callable:
    """Vectorized Phi extended past domain_end by its final value (Phi is constant there)."""

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.asarray(phi(profile, np.minimum(t, profile.domain_end)), dtype=float)

    return fn


# ----------------------------------------------------------------------------
# checks against discretized spaces


@dataclass(frozen=True)
class SetDescriptor:
    """A test set: its mask and whether it is extremal for the profile."""

    label: str
    mask: np.ndarray
    extremal: bool = False


@dataclass
class ProfileValidation:
    rows: list
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def catalog_sets(space: SampleSpace, count: int = 10) -> list[SetDescriptor]:
    """Extremal family for a space: disks, caps or half-lines."""
    pts = space.points
    sets: list[SetDescriptor] = []
    if space.kind == "euclidean_box":
        half = space.params["halfwidth"]
        radius = np.linalg.norm(pts, axis=1)
        # below ~16 cells of radius the Minkowski estimate is biased low
        for r in np.linspace(max(0.25, 16 * space.spacing), 0.6 * half, count):
            sets.append(SetDescriptor(f"ball r={r:.4g}", radius <= r, True))
    elif space.kind == "half_plane":
        half = space.params["halfwidth"]
        radius = np.linalg.norm(pts, axis=1)
        for r in np.linspace(max(0.25, 16 * space.spacing), 0.6 * half, count):
            # half-disks on the boundary line; not extremal for the printed profile
            sets.append(SetDescriptor(f"half-disk r={r:.4g}", radius <= r, False))
    elif space.kind == "sphere":
        polar = math.pi / 2 - space.latitude
        for r in np.linspace(0.2, 2.0, count):
            sets.append(SetDescriptor(f"cap r={r:.4g}", polar <= r, True))
    elif space.kind == "log_concave":
        for a in np.linspace(-2.0, 2.0, count):
            sets.append(SetDescriptor(f"half-space x1<={a:.4g}", pts[:, 0] <= a, True))
    return sets


def validate_profile_against_space(
    profile: Profile,
    space: SampleSpace,
    family: Sequence[SetDescriptor] | None = None,
    tolerance: float = 0.05,
) -> ProfileValidation:
    """Minkowski content of each set against I(mu(A)).

    Every set must satisfy content >= I(mu(A))(1 - tol); extremal sets must
    also satisfy content <= I(mu(A))(1 + tol).  Sets whose extrapolation is
    flagged degenerate are reported but not judged.
    """
    rows, violations = [], []
    for s in family if family is not None else catalog_sets(space):
        m = measure_of(space, s.mask)
        if not 0 < m < profile.domain_end:
            continue
        est = minkowski_estimate(space, s.mask)
        bound = float(profile_value(profile, m))
        ratio = est.value / bound
        row = {"set": s.label, "measure": m, "content": est.value, "profile": bound,
               "ratio": ratio, "extremal": s.extremal, "degenerate": est.degenerate}
        rows.append(row)
        if est.degenerate:
            continue
        if ratio < 1 - tolerance or (s.extremal and ratio > 1 + tolerance):
            violations.append(row)
    return ProfileValidation(rows, violations)


def jubileo_constant(profile: Profile, space: SampleSpace, r_grid=None) -> float:
    """Best C with Upsilon(r) <= C r I(Upsilon(r)) over r with Upsilon(r) <= mu/2."""
    if r_grid is None:
        top = math.pi if space.kind == "sphere" else float(space.params.get("halfwidth", 4.0))
        r_grid = np.linspace(top / 512, top, 512)
    best = 0.0
    for r in r_grid:
        v = ball_measure_function(space, float(r))
        if not 0 < v <= profile.half:
            continue
        best = max(best, v / (r * float(profile_value(profile, v))))
    return best
