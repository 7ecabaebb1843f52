"""Discretized metric measure spaces.

Every space is a finite weighted point cloud: each point stands for a cell
of the underlying space and carries that cell's measure.  Distances are the
exact Euclidean or geodesic ones computed from coordinates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from scipy import special
from scipy.spatial import cKDTree

from .errors import InvalidParams, MissingNeighbors, TruncationInsufficient, UnsupportedKind

log = logging.getLogger(__name__)

KINDS = ("euclidean_box", "half_plane", "sphere", "log_concave")

Predicate = Union[np.ndarray, Callable[[np.ndarray], np.ndarray]]

# truncated log-concave mass must reach 1 - TRUNCATION_TOL
TRUNCATION_TOL = 1e-8


def unit_ball_volume(n: int) -> float:
    """beta_n, Lebesgue measure of the unit ball of R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    """omega_n, n-dimensional Hausdorff measure of the unit sphere S^n."""
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def log_concave_tail(x, p: float):
    """mu_Psi((x, inf)) for Psi(x) = |x|^p / p and x >= 0."""
    x = np.asarray(x, dtype=float)
    return 0.5 * special.gammaincc(1.0 / p, np.abs(x) ** p / p)


def log_concave_cdf(x, p: float):
    """H(x) = mu_Psi((-inf, x)) computed from the incomplete gamma function."""
    x = np.asarray(x, dtype=float)
    tail = log_concave_tail(x, p)
    return np.where(x < 0, tail, 1.0 - tail)


def log_concave_density(x, p: float):
    x = np.asarray(x, dtype=float)
    z = 2.0 * p ** (1.0 / p - 1.0) * math.gamma(1.0 / p)
    return np.exp(-np.abs(x) ** p / p) / z


@dataclass(frozen=True, eq=False)
class SampleSpace:
    """A finite weighted point set standing in for (Omega, d, mu).

    ``points`` are ambient coordinates (R^n for the flat kinds, unit vectors
    in R^{n+1} for spheres).  ``nbr_idx``/``nbr_disp`` hold, per point, the
    indices of its stencil neighbours (``-1`` padded) and the tangent
    displacement to each of them.  ``boundary`` marks the truncation layer of
    infinite-measure kinds.
    """

    kind: str
    points: np.ndarray
    weights: np.ndarray
    total_measure: float
    infinite: bool
    spacing: float
    nbr_idx: np.ndarray
    nbr_disp: np.ndarray
    boundary: np.ndarray
    dim: int
    params: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def cell_measure(self) -> float:
        return float(self.weights.max())

    @property
    def resolution_floor(self) -> float:
        """Smallest level-set measure treated as resolved by the grid.

        Level sets holding few cells are dominated by lattice effects (the
        first ring around a grid point has 4 cells, whatever the radius; the
        relative excess of a lattice disk decays only like 1/radius), so
        quantities defined by sups over level sets ignore measures below
        256 median cells.
        """
        return 256.0 * float(np.median(self.weights))

    @property
    def latitude(self) -> np.ndarray:
        """theta_1 in [-pi/2, pi/2]: the latitude along the last ambient axis."""
        if self.kind != "sphere":
            raise UnsupportedKind(f"latitude is defined on spheres, not {self.kind}")
        return np.arcsin(np.clip(self.points[:, -1], -1.0, 1.0))

    @cached_property
    def _tree(self) -> cKDTree:
        return cKDTree(self.points)

    def distance(self, i: int, j: int) -> float:
        x, y = self.points[i], self.points[j]
        if self.kind == "sphere":
            return float(_chord_to_geodesic(np.linalg.norm(x - y)))
        return float(np.linalg.norm(x - y))

    def distance_to_set(self, mask: np.ndarray, upper: float = np.inf) -> np.ndarray:
        """Distance from every point to the nearest point of ``mask``.

        Distances above ``upper`` come back as ``inf``.
        """
        mask = np.asarray(mask, dtype=bool)
        out = np.full(len(self), np.inf)
        if not mask.any():
            return out
        tree = cKDTree(self.points[mask])
        if self.kind == "sphere":
            bound = np.inf if upper >= math.pi else 2.0 * math.sin(upper / 2.0) * (1 + 1e-12)
            chord, _ = tree.query(self.points, k=1, distance_upper_bound=bound)
            finite = np.isfinite(chord)
            out[finite] = _chord_to_geodesic(chord[finite])
        else:
            d, _ = tree.query(self.points, k=1, distance_upper_bound=upper * (1 + 1e-12))
            out[:] = d
        out[mask] = 0.0
        return out


def _chord_to_geodesic(chord):
    return 2.0 * np.arcsin(np.clip(np.asarray(chord) / 2.0, 0.0, 1.0))


@dataclass(frozen=True, eq=False)
class Field:
    """Scalar function sampled on a space.

    ``grad`` holds analytic values of |grad f| when known; ``None`` selects
    the finite-difference stencil.
    """

    values: np.ndarray
    grad: np.ndarray | None = None
    support_flag: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(values)):
            raise InvalidParams("field values must be finite")
        object.__setattr__(self, "values", values)
        if self.grad is not None:
            grad = np.asarray(self.grad, dtype=float)
            if grad.shape != values.shape:
                raise InvalidParams("gradient must align with values")
            object.__setattr__(self, "grad", grad)

    def __len__(self) -> int:
        return len(self.values)


def check_support(space: SampleSpace, f: Field, atol: float = 0.0) -> bool:
    """True when ``f`` vanishes on the truncation layer of ``space``."""
    return bool(np.all(np.abs(f.values[space.boundary]) <= atol))


# ----------------------------------------------------------------------------
# construction


def build_space(kind: str, **params) -> SampleSpace:
    """Build a catalog space.

    Parameters by kind::

        euclidean_box  n, halfwidth, resolution
        half_plane     halfwidth, resolution           (upper half of the box)
        sphere         n in {1, 2}, resolution         (latitude bands for S^2)
        log_concave    p in [1, 2], n in {1, 2}, truncation, resolution

    ``seed`` is accepted and recorded; the grids themselves are deterministic.
    """
    if kind not in KINDS:
        raise InvalidParams(f"unknown space kind {kind!r}")
    resolution = int(params.get("resolution", 256))
    if resolution < 8:
        raise InvalidParams(f"resolution must be >= 8, got {resolution}")
    builder = {
        "euclidean_box": _build_box,
        "half_plane": _build_half_plane,
        "sphere": _build_sphere,
        "log_concave": _build_log_concave,
    }[kind]
    params = dict(params, resolution=resolution)
    params.setdefault("seed", 0)
    return builder(params)


def _grid_neighbors(shape: Sequence[int], spacing: float):
    """Axis stencil on a tensor grid: (idx, disp) padded with -1 / zeros."""
    dim = len(shape)
    n = int(np.prod(shape))
    idx = np.arange(n).reshape(shape)
    nbr_idx = np.full((n, 2 * dim), -1, dtype=np.int64)
    nbr_disp = np.zeros((n, 2 * dim, dim))
    k = 0
    for axis in range(dim):
        for step in (-1, 1):
            shifted = np.full(shape, -1, dtype=np.int64)
            src = [slice(None)] * dim
            dst = [slice(None)] * dim
            if step == 1:
                src[axis], dst[axis] = slice(1, None), slice(None, -1)
            else:
                src[axis], dst[axis] = slice(None, -1), slice(1, None)
            shifted[tuple(dst)] = idx[tuple(src)]
            nbr_idx[:, k] = shifted.ravel()
            nbr_disp[:, k, axis] = np.where(nbr_idx[:, k] >= 0, step * spacing, 0.0)
            k += 1
    return nbr_idx, nbr_disp


def _tensor_points(axes: Sequence[np.ndarray]) -> np.ndarray:
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _edge_layer(axes, lows, highs, width, skip_low=()):
    """Points within ``width`` of the outer faces of a box (optional faces skipped)."""
    mesh = np.meshgrid(*axes, indexing="ij")
    layer = np.zeros(mesh[0].shape, dtype=bool)
    for i, (m, lo, hi) in enumerate(zip(mesh, lows, highs)):
        if i not in skip_low:
            layer |= m - lo < width
        layer |= hi - m < width
    return layer.ravel()


def _build_box(params) -> SampleSpace:
    n = int(params.get("n", 2))
    half = float(params.get("halfwidth", 4.0))
    res = params["resolution"]
    if n < 1 or half <= 0:
        raise InvalidParams("euclidean_box needs n >= 1 and halfwidth > 0")
    delta = 2 * half / res
    axis = -half + delta * (np.arange(res) + 0.5)
    points = _tensor_points([axis] * n)
    weights = np.full(len(points), delta**n)
    nbr_idx, nbr_disp = _grid_neighbors((res,) * n, delta)
    boundary = _edge_layer([axis] * n, [-half] * n, [half] * n, 2 * delta)
    return SampleSpace(
        kind="euclidean_box",
        points=points,
        weights=weights,
        total_measure=(2 * half) ** n,
        infinite=True,
        spacing=delta,
        nbr_idx=nbr_idx,
        nbr_disp=nbr_disp,
        boundary=boundary,
        dim=n,
        params=dict(params, n=n, halfwidth=half),
    )


def _build_half_plane(params) -> SampleSpace:
    half = float(params.get("halfwidth", 4.0))
    res = params["resolution"]
    if half <= 0:
        raise InvalidParams("half_plane needs halfwidth > 0")
    delta = 2 * half / res
    xs = -half + delta * (np.arange(res) + 0.5)
    ys = delta * (np.arange(res // 2) + 0.5)
    points = _tensor_points([xs, ys])
    weights = np.full(len(points), delta**2)
    nbr_idx, nbr_disp = _grid_neighbors((res, res // 2), delta)
    boundary = _edge_layer([xs, ys], [-half, 0.0], [half, half], 2 * delta, skip_low=(1,))
    return SampleSpace(
        kind="half_plane",
        points=points,
        weights=weights,
        total_measure=float(weights.sum()),
        infinite=True,
        spacing=delta,
        nbr_idx=nbr_idx,
        nbr_disp=nbr_disp,
        boundary=boundary,
        dim=2,
        params=dict(params, n=2, halfwidth=half),
    )


def _build_sphere(params) -> SampleSpace:
    n = int(params.get("n", 2))
    res = params["resolution"]
    if n == 1:
        angles = 2 * math.pi * (np.arange(res) + 0.5) / res
        points = np.stack([np.cos(angles), np.sin(angles)], axis=1)
        weights = np.full(res, 1.0 / res)
        step = 2 * math.pi / res
        idx = np.arange(res)
        nbr_idx = np.stack([(idx - 1) % res, (idx + 1) % res], axis=1)
        tangent = np.stack([-np.sin(angles), np.cos(angles)], axis=1)
        nbr_disp = np.stack([-step * tangent, step * tangent], axis=1)
        spacing = step
    elif n == 2:
        points, weights = _latitude_bands(res)
        spacing = math.pi / res
        nbr_idx, nbr_disp = _sphere_stencil(points, k=8)
    else:
        raise InvalidParams(f"sphere spaces are built for n in {{1, 2}}, got {n}")
    # cell measures are exact; renormalize away the last ulps so mu(S^n) == 1
    weights = weights / weights.sum()
    return SampleSpace(
        kind="sphere",
        points=points,
        weights=weights,
        total_measure=1.0,
        infinite=False,
        spacing=spacing,
        nbr_idx=nbr_idx,
        nbr_disp=nbr_disp,
        boundary=np.zeros(len(weights), dtype=bool),
        dim=n,
        params=dict(params, n=n),
    )


def _latitude_bands(res: int):
    """Latitude bands of equal angular height; equal-area cells inside a band."""
    edges = -math.pi / 2 + math.pi * np.arange(res + 1) / res
    sin_edges = np.sin(edges)
    pts, wts = [], []
    for i in range(res):
        area = (sin_edges[i + 1] - sin_edges[i]) / 2.0
        lat = math.asin((sin_edges[i] + sin_edges[i + 1]) / 2.0)
        count = max(4, int(round(2 * res * math.cos(lat))))
        lon = 2 * math.pi * (np.arange(count) + 0.5 * (i % 2 + 0.5)) / count
        c = math.cos(lat)
        pts.append(np.stack([c * np.cos(lon), c * np.sin(lon), np.full(count, math.sin(lat))], axis=1))
        wts.append(np.full(count, area / count))
    return np.concatenate(pts), np.concatenate(wts)


def _sphere_stencil(points: np.ndarray, k: int):
    """k nearest neighbours with log-map displacements in the tangent plane."""
    tree = cKDTree(points)
    _, nbr = tree.query(points, k=k + 1)
    nbr = nbr[:, 1:]
    y = points[nbr]
    x = points[:, None, :]
    cos = np.clip(np.sum(x * y, axis=-1), -1.0, 1.0)
    tangent = y - cos[..., None] * x
    norm = np.linalg.norm(tangent, axis=-1)
    angle = np.arccos(cos)
    scale = np.divide(angle, norm, out=np.zeros_like(norm), where=norm > 0)
    return nbr.astype(np.int64), tangent * scale[..., None]


def _auto_truncation(p: float) -> float:
    t = 1.0
    while 2 * float(log_concave_tail(t, p)) > TRUNCATION_TOL * 1e-2:
        t *= 1.25
    return t


def _build_log_concave(params) -> SampleSpace:
    p = float(params.get("p", 2.0))
    n = int(params.get("n", 1))
    res = params["resolution"]
    if not 1.0 <= p <= 2.0:
        raise InvalidParams(f"log_concave needs p in [1, 2], got {p}")
    if n not in (1, 2):
        raise InvalidParams(f"log_concave spaces are built for n in {{1, 2}}, got {n}")
    trunc = params.get("truncation")
    trunc = _auto_truncation(p) if trunc is None else float(trunc)
    mass_1d = 1.0 - 2.0 * float(log_concave_tail(trunc, p))
    if mass_1d ** n < 1.0 - TRUNCATION_TOL:
        raise TruncationInsufficient(
            f"truncation {trunc} keeps mass {mass_1d ** n:.3e}; need >= {1 - TRUNCATION_TOL}"
        )
    delta = 2 * trunc / res
    edges = -trunc + delta * np.arange(res + 1)
    cdf = log_concave_cdf(edges, p)
    # for the left half take differences of tails to keep relative accuracy
    tails = log_concave_tail(edges, p)
    cell = np.where(edges[1:] <= 0, tails[1:] - tails[:-1], np.diff(cdf))
    cell = np.where(edges[:-1] >= 0, tails[:-1] - tails[1:], cell)
    axis = -trunc + delta * (np.arange(res) + 0.5)
    points = _tensor_points([axis] * n)
    weights = cell.copy()
    for _ in range(n - 1):
        weights = np.outer(weights, cell).ravel()
    if np.any(weights <= 0):
        # far tails underflow; keep positivity
        weights = np.maximum(weights, np.finfo(float).tiny)
    nbr_idx, nbr_disp = _grid_neighbors((res,) * n, delta)
    boundary = _edge_layer([axis] * n, [-trunc] * n, [trunc] * n, 2 * delta)
    return SampleSpace(
        kind="log_concave",
        points=points,
        weights=weights,
        total_measure=float(weights.sum()),
        infinite=False,
        spacing=delta,
        nbr_idx=nbr_idx,
        nbr_disp=nbr_disp,
        boundary=boundary,
        dim=n,
        params=dict(params, p=p, n=n, truncation=trunc),
    )


# ----------------------------------------------------------------------------
# primitives


def as_mask(space: SampleSpace, predicate: Predicate) -> np.ndarray:
    if callable(predicate):
        mask = np.asarray(predicate(space.points), dtype=bool)
    else:
        mask = np.asarray(predicate, dtype=bool)
    if mask.shape != (len(space),):
        raise InvalidParams("predicate must select among the space's points")
    return mask


def measure_of(space: SampleSpace, predicate: Predicate) -> float:
    """mu(A) for A given as a boolean mask or a vectorized predicate on points."""
    mask = as_mask(space, predicate)
    return float(np.sum(space.weights[mask]))


def gradient_modulus(space: SampleSpace, f: Field) -> Field:
    """|grad f| per point.

    Analytic gradients are passed through.  Otherwise the gradient vector is
    the least-squares fit of f(y) - f(x) ~ g . (y - x) over the stencil (on
    tensor grids: central differences, one-sided at the edges) and its length
    is returned.
    """
    if len(f) != len(space):
        raise InvalidParams("field does not align with space")
    if f.grad is not None:
        return Field(np.abs(f.grad), grad=None, support_flag=f.support_flag)
    idx = space.nbr_idx
    valid = idx >= 0
    safe = np.where(valid, idx, 0)
    df = np.where(valid, f.values[safe] - f.values[:, None], 0.0)
    disp = np.where(valid[..., None], space.nbr_disp, 0.0)
    gram = np.einsum("nki,nkj->nij", disp, disp)
    rhs = np.einsum("nki,nk->ni", disp, df)
    ambient = disp.shape[-1]
    if space.kind == "sphere":
        # tangent displacements never see the normal direction; pin it to zero
        normal = space.points
        gram = gram + np.einsum("ni,nj->nij", normal, normal)
    rank_ok = np.linalg.matrix_rank(gram) >= ambient
    if not np.all(rank_ok):
        bad = int(np.flatnonzero(~rank_ok)[0])
        raise MissingNeighbors(f"point {bad} has a degenerate stencil")
    grad = np.linalg.solve(gram, rhs[..., None])[..., 0]
    return Field(np.linalg.norm(grad, axis=1), support_flag=f.support_flag)


class ContentEstimate(NamedTuple):
    value: float
    raw: tuple
    hs: tuple
    degenerate: bool


def default_h_sequence(space: SampleSpace) -> list[float]:
    """Widths 16.5, 15.5, ..., 4.5 grid spacings.

    Half-integer multiples keep lattice shells strictly inside or outside
    each neighbourhood; thirteen widths let the least-squares fit average
    out the lattice noise of oblique boundaries.
    """
    d = space.spacing
    return [(k + 0.5) * d for k in range(16, 3, -1)]


def _fit_slope(hs: Sequence[float], ys: Sequence[float]) -> float:
    """Slope at h = 0 of the least-squares quadratic through (h_i, y_i)."""
    deg = min(2, len(hs) - 1)
    coef = np.polyfit(np.asarray(hs, dtype=float), np.asarray(ys, dtype=float), deg)
    return float(coef[-2])


def minkowski_estimate(
    space: SampleSpace,
    predicate: Predicate,
    h_sequence: Sequence[float] | None = None,
) -> ContentEstimate:
    """Extrapolated perimeter of A from the growth of its h-neighbourhoods.

    The increments D(h) = mu(A_h) - mu(A) are fitted by a quadratic in h and
    its slope at 0 is returned.  In the continuum D(0) = 0; on a grid the
    discrete boundary sits a fraction of a cell away from the true one, which
    shows up as a constant term that the fit absorbs instead of letting it
    blow up like 1/h in the raw quotients.  Widths whose neighbourhood eats
    more than half of the complement are dropped (saturation).
    """
    mask = as_mask(space, predicate)
    hs = list(default_h_sequence(space) if h_sequence is None else h_sequence)
    if len(hs) < 3:
        raise InvalidParams("at least three h values are needed for extrapolation")
    if any(b >= a for a, b in zip(hs, hs[1:])) or hs[-1] <= 0:
        raise InvalidParams("h_sequence must be positive and strictly decreasing")
    if hs[-1] < 2 * space.spacing * (1 - 1e-12):
        raise InvalidParams("h values must be at least twice the grid spacing")
    if not mask.any():
        return ContentEstimate(0.0, tuple(0.0 for _ in hs), tuple(hs), False)
    base = float(np.sum(space.weights[mask]))
    rest = float(np.sum(space.weights[~mask]))
    dist = space.distance_to_set(mask, upper=hs[0])
    grown = [float(np.sum(space.weights[dist <= h])) - base for h in hs]
    raw = tuple(g / h for g, h in zip(grown, hs))
    keep = [i for i, g in enumerate(grown) if g <= 0.5 * rest]
    nonmonotone = any(b > a * (1 + 1e-12) + 1e-15 for a, b in zip(grown, grown[1:]))
    if len(keep) >= 3 and not nonmonotone:
        value = _fit_slope([hs[i] for i in keep], [grown[i] for i in keep])
        if math.isfinite(value) and not (value <= 0 < grown[keep[0]]):
            return ContentEstimate(max(value, 0.0), raw, tuple(hs), False)
    log.warning("degenerate Minkowski extrapolation %s; using smallest-h estimate", raw)
    return ContentEstimate(raw[-1], raw, tuple(hs), True)


def minkowski_content(space: SampleSpace, predicate: Predicate, h_sequence=None) -> float:
    """Perimeter mu^+(A) of a set given by mask or predicate."""
    return minkowski_estimate(space, predicate, h_sequence).value


def ball_measure_function(space: SampleSpace, r: float) -> float:
    """Upsilon(r) = mu(B(r)), for kinds whose ball measure depends on r alone."""
    if r < 0:
        raise InvalidParams("radius must be nonnegative")
    if space.kind == "euclidean_box":
        n = space.dim
        return unit_ball_volume(n) * r**n
    if space.kind == "sphere":
        return sphere_cap_measure(space.dim, r)
    raise UnsupportedKind(f"ball measure is not radius-determined on {space.kind}")


def sphere_cap_measure(n: int, r):
    """Normalized measure of a geodesic cap of radius r on S^n."""
    r = np.clip(np.asarray(r, dtype=float), 0.0, math.pi)
    if n == 1:
        out = r / math.pi
    else:
        half = 0.5 * special.betainc(n / 2.0, 0.5, np.sin(r) ** 2)
        out = np.where(r <= math.pi / 2, half, 1.0 - half)
    return float(out) if out.ndim == 0 else out
