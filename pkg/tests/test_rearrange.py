import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from isoperim import (
    Field, RiNormSpec, StepFunction, build_space, decreasing_rearrangement, distribution_function,
    maximal_average, median, ri_norm, ri_norm_of_function,
)
from isoperim.errors import InfiniteMeasureSpace, InvalidParams, OutOfDomain, UnsupportedNorm
from isoperim.rearrange import product_partial_integral

W3 = np.array([0.5, 0.3, 0.2])
V3 = np.array([1.0, 3.0, 2.0])


def atoms(n_min=1, n_max=40):
    """(values, weights) with ties likely."""
    return st.integers(n_min, n_max).flatmap(lambda n: st.tuples(
        st.one_of(hnp.arrays(float, n, elements=st.floats(-10, 10)),
                  hnp.arrays(float, n, elements=st.integers(-3, 3).map(float))),
        hnp.arrays(float, n, elements=st.floats(0.01, 2.0))))


def pairs(n_max=40):
    return st.integers(1, n_max).flatmap(lambda n: st.tuples(
        hnp.arrays(float, n, elements=st.floats(-10, 10)),
        hnp.arrays(float, n, elements=st.floats(-10, 10)),
        hnp.arrays(float, n, elements=st.floats(0.01, 2.0))))


def oracle_inverse(values, weights, s):
    """inf{t >= 0 : mu{|f| > t} <= s} by direct counting over candidate levels."""
    a = np.abs(values)
    for t in np.concatenate([[0.0], np.unique(a)]):
        if np.sum(weights[a > t]) <= s + 1e-12 * np.sum(weights):
            return t
    return a.max()


# -- distribution function and rearrangement ---------------------------------


def test_three_atoms():
    mu = distribution_function(V3, W3)
    assert mu(1.5) == pytest.approx(0.5, abs=1e-15)
    fs = decreasing_rearrangement(V3, W3)
    assert np.allclose(fs.breakpoints, [0.0, 0.3, 0.5]) and np.allclose(fs.values, [3, 2, 1])
    assert fs.domain_end == pytest.approx(1.0)
    assert fs(0.29) == 3 and fs(0.3) == 2 and fs(0.99) == 1
    assert median(V3, W3) == 1.0


def test_constant_and_indicator():
    w = np.array([0.25, 0.25, 0.5])
    mu = distribution_function(np.full(3, 2.0), w)
    assert mu(1.999) == pytest.approx(1.0) and mu(2.0) == 0.0
    chi = np.array([1.0, 0.0, 0.0])
    mu = distribution_function(chi, w)
    assert mu(0.0) == pytest.approx(0.25) and mu(0.999) == pytest.approx(0.25) and mu(1.0) == 0.0
    fs = decreasing_rearrangement(chi, w)
    assert fs(0.2) == 1.0 and fs(0.25) == 0.0 and fs.integral(1.0) == pytest.approx(0.25)


@given(atoms(1, 60))
def test_rearrangement_inverts_distribution(vw):
    values, weights = vw
    fs = decreasing_rearrangement(values, weights)
    assert fs.monotone and np.all(np.diff(fs.values) <= 0)
    for b, v in zip(fs.breakpoints, fs.values):
        assert abs(oracle_inverse(values, weights, b) - v) <= 1e-12


@given(atoms(1, 60), st.lists(st.floats(0, 12), min_size=1, max_size=10))
def test_equimeasurability(vw, probes):
    values, weights = vw
    fs = decreasing_rearrangement(values, weights)
    mu = distribution_function(values, weights)
    for t in list(probes) + list(np.abs(values)):
        assert abs(mu(t) - np.sum(fs.lengths[fs.values > t])) <= 1e-12 * np.sum(weights)


def test_field_and_space_inputs(plane):
    f = Field(plane.points[:, 0].copy())
    fs = decreasing_rearrangement(f, plane)
    assert fs.domain_end == pytest.approx(64.0)
    assert fs.values[0] == pytest.approx(4.0 - plane.spacing / 2)


# -- maximal average ---------------------------------------------------------


def test_maximal_average_indicator():
    a = 0.4
    ff = maximal_average(StepFunction(np.array([0.0, a]), np.array([1.0, 0.0]), 1.0))
    assert ff(0.1) == pytest.approx(1.0) and ff(a) == pytest.approx(1.0)
    assert ff(0.8) == pytest.approx(a / 0.8, rel=1e-14)


def test_maximal_average_constant():
    ff = maximal_average(StepFunction(np.array([0.0]), np.array([2.5]), 3.0))
    assert np.allclose(ff(np.linspace(0.01, 3, 20)), 2.5)


def test_maximal_average_domain():
    ff = maximal_average(StepFunction(np.array([0.0]), np.array([1.0]), 1.0))
    with pytest.raises(OutOfDomain):
        ff(0.0)


@given(atoms(1, 40))
def test_maximal_average_dominates(vw):
    fs = decreasing_rearrangement(*vw)
    ff = maximal_average(fs)
    t = np.linspace(fs.domain_end / 200, fs.domain_end, 200)
    assert np.all(ff(t) >= fs(t) - 1e-12)
    assert np.all(np.diff(ff(t)) <= 1e-12)


# -- subadditivity and Hardy-Littlewood --------------------------------------


@given(pairs(), st.lists(st.floats(1e-3, 1.0), min_size=1, max_size=8))
def test_rearrangement_of_sum(uvw, fracs):
    u, v, w = uvw
    M = np.sum(w)
    us, vs, ws = (decreasing_rearrangement(x, w) for x in (u, v, u + v))
    for f in fracs:
        s = f * M
        assert ws(s) <= us(s / 2) + vs(s / 2) + 1e-12 * (1 + np.abs(u).max() + np.abs(v).max())
        lhs = maximal_average(ws)(s)
        rhs = maximal_average(us)(s) + maximal_average(vs)(s)
        assert lhs <= rhs + 1e-12 * (1 + rhs)


@given(pairs(50), st.floats(0, 1))
def test_hardy_littlewood(uvw, frac):
    u, v, w = uvw
    lhs, rhs = product_partial_integral(u, v, w, frac * np.sum(w))
    assert lhs <= rhs + 1e-12 * (1 + abs(rhs))


def test_hardy_littlewood_equality_cases():
    w = np.array([0.2, 0.3, 0.5])
    chi = np.array([1.0, 0.0, 1.0])
    for t in (0.1, 0.5, 0.9):
        lhs, rhs = product_partial_integral(chi, chi, w, t)
        assert lhs == pytest.approx(rhs, abs=1e-15)
        lhs, rhs = product_partial_integral(np.full(3, 2.0), np.array([3.0, -1.0, 2.0]), w, t)
        assert lhs == pytest.approx(rhs, abs=1e-15)


# -- medians -----------------------------------------------------------------


def test_median_of_coordinate(plane):
    x = plane.points[:, 0]
    m = median(x, plane.weights)
    assert abs(m) <= plane.spacing / 2
    assert np.sum(plane.weights[x >= m]) >= 32 and np.sum(plane.weights[x <= m]) >= 32


def test_median_of_small_indicator():
    w = np.full(10, 0.1)
    assert median((np.arange(10) < 3).astype(float), w) == 0.0


def test_median_needs_finite_measure(plane):
    with pytest.raises(InfiniteMeasureSpace):
        median(plane.points[:, 0], plane)


@given(atoms(1, 60), st.floats(-20, 20))
def test_median_definition_and_estimate(vw, shift):
    values, weights = vw
    values = values + shift
    M = np.sum(weights)
    m = median(values, weights)
    assert np.sum(weights[values >= m]) >= M / 2 * (1 - 1e-12)
    assert np.sum(weights[values <= m]) >= M / 2 * (1 - 1e-12)
    assert abs(m) <= 2 / M * np.sum(weights * np.abs(values)) * (1 + 1e-12) + 1e-300


# -- r.i. norms --------------------------------------------------------------


def test_indicator_l1():
    sf = StepFunction(np.array([0.0, 0.7]), np.array([1.0, 0.0]), 2.0)
    assert ri_norm(sf, RiNormSpec.lp(1)) == pytest.approx(0.7, rel=1e-15)


def test_marcinkiewicz_of_inverse_norm_step():
    # values sqrt(pi/b_{i+1}) on [b_i, b_{i+1}): f* Phi peaks at the right ends, all = 1/2
    b = np.concatenate([[0.0], np.geomspace(1e-6, 10.0, 400)])
    vals = np.sqrt(math.pi / np.append(b[1:], 20.0))
    sf = StepFunction(b, vals, 20.0)
    phi = lambda t: np.sqrt(np.asarray(t, dtype=float)) / (2 * math.sqrt(math.pi))  # noqa: E731
    assert ri_norm(sf, RiNormSpec.marcinkiewicz(phi)) == pytest.approx(0.5, rel=1e-12)


def test_marcinkiewicz_of_inverse_norm_grid(plane):
    w_inv = 1.0 / np.linalg.norm(plane.points, axis=1)
    sf = decreasing_rearrangement(w_inv, plane.weights)
    phi = lambda t: np.sqrt(np.asarray(t, dtype=float)) / (2 * math.sqrt(math.pi))  # noqa: E731
    spec = RiNormSpec.marcinkiewicz(phi, t_min=plane.resolution_floor)
    assert ri_norm(sf.truncate(math.pi * 16), spec) == pytest.approx(0.5, rel=0.05)


@given(st.integers(1, 30).flatmap(lambda n: st.tuples(
    hnp.arrays(float, n, elements=st.floats(0.01, 5)), hnp.arrays(float, n, elements=st.floats(0.01, 5)))))
def test_lorentz_pp_is_lp(data):
    lengths, values = data
    b = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    sf = StepFunction(b, np.sort(values)[::-1], float(np.sum(lengths)))
    for p in (1.0, 1.5, 2.0, 3.0):
        a, c = ri_norm(sf, RiNormSpec.lorentz(p, p)), ri_norm(sf, RiNormSpec.lp(p))
        assert abs(a - c) <= 1e-12 * c


def test_lorentz_endpoints():
    sf = StepFunction(np.array([0.0, 1.0]), np.array([2.0, 1.0]), 3.0)
    assert ri_norm(sf, RiNormSpec.lp(math.inf)) == 2.0
    # weak L^2: sup f*(t) t^{1/2} at the right ends
    assert ri_norm(sf, RiNormSpec.lorentz(2, math.inf)) == pytest.approx(max(2.0, math.sqrt(3)))
    with pytest.raises(UnsupportedNorm):
        ri_norm(sf, RiNormSpec.lorentz(math.inf, math.inf))


def test_log_lorentz_constant():
    # sup_t t^{1/2}(1 + log(1/t)) attained at t = e^{-1}
    sf = StepFunction(np.array([0.0]), np.array([1.0]), 1.0)
    value = ri_norm(sf, RiNormSpec.log_lorentz(2, 1.0))
    assert value == pytest.approx(2 * math.exp(-0.5), rel=1e-12)


def test_norm_of_function_quadrature():
    value = ri_norm_of_function(lambda t: np.asarray(t) ** -0.5, RiNormSpec.lp(1), [1.0])
    assert value == pytest.approx(2.0, rel=1e-6)
    value = ri_norm_of_function(lambda t: np.exp(-np.asarray(t)), RiNormSpec.lp(2), [1.0, 50.0])
    assert value == pytest.approx(math.sqrt((1 - math.exp(-100)) / 2), rel=1e-10)


def test_invalid_norm_parameters():
    with pytest.raises(InvalidParams):
        RiNormSpec.lp(0.5)
    with pytest.raises(InvalidParams):
        RiNormSpec.lorentz(2, 0.5)


def test_step_function_validation():
    with pytest.raises(InvalidParams):
        StepFunction(np.array([0.1]), np.array([1.0]), 1.0)
    with pytest.raises(InvalidParams):
        StepFunction(np.array([0.0, 0.5]), np.array([1.0, 2.0]), 1.0)
    with pytest.raises(InvalidParams):
        StepFunction(np.array([0.0, 1.0]), np.array([2.0, 1.0]), 1.0)
    sf = StepFunction(np.array([0.0, 0.5]), np.array([1.0, 2.0]), 1.0, monotone=False)
    assert sf.left_limit(0.5) == 1.0 and sf(0.5) == 2.0


# -- majorization ------------------------------------------------------------


@given(st.integers(2, 60).flatmap(lambda n: st.tuples(
    hnp.arrays(float, n, elements=st.floats(0, 10)),
    st.lists(st.integers(1, n - 1), max_size=10, unique=True))))
def test_majorized_norms(data):
    g, cuts = data
    n = len(g)
    w = np.full(n, 1.0 / n)
    g = np.sort(g)[::-1]
    f = np.concatenate([np.full(len(b), b.mean()) for b in np.split(g, sorted(cuts))])
    fs, gs = decreasing_rearrangement(f, w), decreasing_rearrangement(g, w)
    grid = np.linspace(0, 1, 129)
    assert np.all(fs.integral(grid) <= gs.integral(grid) + 1e-12 * (1 + g.max()))
    for nm in (RiNormSpec.lp(1), RiNormSpec.lp(2), RiNormSpec.lorentz(2, 1)):
        assert ri_norm(fs, nm) <= ri_norm(gs, nm) * (1 + 1e-10) + 1e-300
    phi = lambda t: np.sqrt(np.asarray(t, dtype=float))  # noqa: E731
    ends = fs.edges[1:]
    bound = np.max(maximal_average(gs)(ends) * phi(ends))
    assert ri_norm(fs, RiNormSpec.marcinkiewicz(phi)) <= bound * (1 + 1e-10) + 1e-300
