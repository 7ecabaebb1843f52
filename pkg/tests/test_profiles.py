import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from isoperim import build_space, jubileo_constant, make_profile, phi, profile_value, validate_profile_against_space
from isoperim.errors import InvalidParams, OutOfDomain, TargetOutOfBracket
from isoperim.profiles import catalog_sets, invert_monotone, phi_handle
from isoperim.spaces import log_concave_cdf

CATALOG = [("euclidean", {"n": 1}), ("euclidean", {"n": 2}), ("euclidean", {"n": 3}), ("half_plane", {}),
           ("sphere", {"n": 1}), ("sphere", {"n": 2}), ("sphere", {"n": 3}), ("sphere", {"n": 5}),
           ("log_concave", {"p": 1.0}), ("log_concave", {"p": 1.3}), ("log_concave", {"p": 2.0})]


def probe_grid(prof):
    end = prof.domain_end if prof.finite else 10.0
    return np.linspace(end / 1024, end * (1 - 1 / 1024), 512)


# -- closed forms ------------------------------------------------------------


def test_euclidean_values():
    p = make_profile("euclidean", n=2)
    assert p(1.0) == pytest.approx(2 * math.sqrt(math.pi), rel=1e-14)
    assert p(4.0) == pytest.approx(4 * math.sqrt(math.pi), rel=1e-14)
    assert phi(p, 1.0) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)
    # n beta_n^{1/n} t^{1 - 1/n} in dimension 3: beta_3 = 4 pi / 3
    p3 = make_profile("euclidean", n=3)
    assert p3(2.0) == pytest.approx(3 * (4 * math.pi / 3) ** (1 / 3) * 2 ** (2 / 3), rel=1e-14)


def test_half_plane_value():
    assert make_profile("half_plane")(2.0) == pytest.approx(math.sqrt(math.pi * 2.0), rel=1e-14)


def test_sphere2_closed_form():
    p = make_profile("sphere", n=2)
    assert abs(p(0.5) - 0.5) <= 1e-8
    t = np.linspace(1 / 1024, 1 - 1 / 1024, 512)
    assert np.max(np.abs(p(t) - np.sqrt(t * (1 - t)))) <= 1e-6


@pytest.mark.parametrize("n", [3, 4, 6])
def test_sphere_profile_against_cap_quadrature(n):
    # cap of radius r: measure int_0^r sin^{n-1} / int_0^pi sin^{n-1}, boundary sin^{n-1}(r) / int_0^pi sin^{n-1}
    total, _ = integrate.quad(lambda s: math.sin(s) ** (n - 1), 0, math.pi, epsabs=1e-14)
    p = make_profile("sphere", n=n)
    for r in (0.1, 0.7, 1.4, 2.2, 3.0):
        m, _ = integrate.quad(lambda s: math.sin(s) ** (n - 1), 0, r, epsabs=1e-14)
        assert p(m / total) == pytest.approx(math.sin(r) ** (n - 1) / total, rel=1e-8)


def test_circle_profile_is_constant():
    p = make_profile("sphere", n=1)
    t = np.linspace(0.01, 0.99, 50)
    assert np.allclose(p(t), 1 / math.pi, rtol=1e-13)
    assert np.allclose(phi(p, t), np.where(t <= 0.5, math.pi * t, math.pi / 2), rtol=1e-12)


def test_gaussian_values():
    p = make_profile("log_concave", p=2.0)
    assert abs(p(0.5) - 1 / math.sqrt(2 * math.pi)) <= 1e-8
    for t in (0.1, 0.3):
        assert abs(p(t) - p(1 - t)) <= 1e-9
    for a in (-3.0, -1.0, -0.2, 0.4, 2.5):
        assert p(stats.norm.cdf(a)) == pytest.approx(stats.norm.pdf(a), rel=1e-10)


def test_laplace_profile():
    # density e^{-|x|}/2: the tail mass below x equals the density at x, so I(t) = min(t, 1 - t)
    p = make_profile("log_concave", p=1.0)
    t = np.linspace(0.001, 0.999, 200)
    assert np.allclose(p(t), np.minimum(t, 1 - t), rtol=1e-10)


def test_gaussian_asymptote():
    p = make_profile("log_concave", p=2.0)
    t = 1e-6
    assert 0.8 <= p(t) / (t * math.sqrt(2 * math.log(1 / t))) <= 1.2


def test_scaled_profile():
    p = make_profile("log_concave", p=2.0)
    q = p.scaled(0.5)
    t = np.linspace(0.05, 0.95, 19)
    assert np.allclose(q(t), p(t) / 2, rtol=1e-15)
    assert np.allclose(phi(q, t), 2 * phi(p, t), rtol=1e-14)
    with pytest.raises(InvalidParams):
        p.scaled(0.0)


# -- invariants on the catalog ------------------------------------------------


@pytest.mark.parametrize("kind,params", CATALOG)
def test_profile_shape(kind, params):
    prof = make_profile(kind, **params)
    t = probe_grid(prof)
    iso = prof(t)
    assert np.all(iso > 0)
    assert np.max(np.diff(iso, 2)) <= 1e-10  # concave
    if prof.finite:
        assert np.max(np.abs(iso - prof(prof.domain_end - t))) <= 1e-9
    q = t / iso
    assert np.all(np.diff(q) >= -1e-12 * q[1:])
    assert np.all(np.diff(phi(prof, t)) >= -1e-12)
    if params.get("n", 2) > 1:  # the profile of R^1 and of S^1 is constant
        assert prof(1e-12 * (prof.domain_end if prof.finite else 1.0)) < 1e-3


@pytest.mark.parametrize("kind,params", CATALOG)
def test_primitive_matches_quadrature(kind, params):
    prof = make_profile(kind, **params)
    end = prof.domain_end if prof.finite else 10.0
    for a, b in [(0.01, 0.2), (0.1, 0.45), (0.3, 0.8)]:
        a, b = a * end, b * end
        oracle, _ = integrate.quad(lambda s: 1.0 / prof(s), a, b, epsabs=1e-13, epsrel=1e-12, limit=200)
        assert prof.inverse_integral(a, b) == pytest.approx(oracle, rel=1e-9)


def test_domain_errors():
    p = make_profile("sphere", n=2)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(OutOfDomain):
            profile_value(p, bad)
    with pytest.raises(OutOfDomain):
        phi(p, 0.0)
    with pytest.raises(OutOfDomain):
        profile_value(make_profile("euclidean", n=2), -1.0)
    assert phi_handle(p)(5.0) == pytest.approx(phi(p, 1.0))


@pytest.mark.parametrize("kind,params", [("euclidean", {"n": 0}), ("sphere", {"n": 0}),
                                         ("log_concave", {"p": 2.5}), ("log_concave", {"p": 0.9}),
                                         ("torus", {})])
def test_make_profile_errors(kind, params):
    with pytest.raises(InvalidParams):
        make_profile(kind, **params)


# -- monotone inversion -------------------------------------------------------


def test_invert_examples():
    assert invert_monotone(lambda x: x * x, 4.0, (0.0, 3.0)) == pytest.approx(2.0, abs=1e-12)
    assert abs(invert_monotone(lambda th: (1 + np.sin(th)) / 2, 0.5, (-math.pi / 2, math.pi / 2))) <= 1e-12
    assert abs(invert_monotone(lambda x: log_concave_cdf(x, 2.0), 0.5, (-8.0, 8.0))) <= 1e-12


def test_invert_decreasing_and_vector():
    x = invert_monotone(lambda x: np.exp(-x), np.array([0.5, 0.1]), (0.0, 10.0), derivative=lambda x: -np.exp(-x))
    assert np.allclose(x, [math.log(2), math.log(10)], atol=1e-12)


@given(st.floats(0.01, 0.99))
def test_invert_round_trip(target):
    x = invert_monotone(lambda x: stats.norm.cdf(x), target, (-9.0, 9.0))
    assert abs(stats.norm.cdf(x) - target) <= 1e-12


def test_invert_out_of_bracket():
    with pytest.raises(TargetOutOfBracket):
        invert_monotone(lambda x: x, 5.0, (0.0, 1.0))


# -- validation against discretized spaces -------------------------------------


def test_sphere_caps_validate(sphere2, p_sphere):
    val = validate_profile_against_space(p_sphere, sphere2)
    assert len(val.rows) == 10 and val.ok
    for row in val.rows:
        assert 0.95 <= row["ratio"] <= 1.05


def test_disks_validate(plane, p_plane):
    val = validate_profile_against_space(p_plane, plane)
    assert val.ok
    for row in val.rows:
        assert row["ratio"] == pytest.approx(1.0, abs=0.05)


def test_gaussian_half_lines_validate(gauss_line, p_gauss):
    val = validate_profile_against_space(p_gauss, gauss_line)
    assert val.ok and len(val.rows) == 10
    for row in val.rows:
        assert row["ratio"] == pytest.approx(1.0, abs=0.05)


def test_non_extremal_sets_only_bounded_below(plane, p_plane):
    from isoperim.profiles import SetDescriptor
    square = np.all(np.abs(plane.points) <= 1.0, axis=1)
    val = validate_profile_against_space(p_plane, plane, [SetDescriptor("square", square, False)])
    # perimeter 8 against I(4) = 4 sqrt(pi) ~ 7.09
    assert val.ok and val.rows[0]["ratio"] == pytest.approx(8 / (4 * math.sqrt(math.pi)), rel=0.05)
    val = validate_profile_against_space(p_plane, plane, [SetDescriptor("square", square, True)])
    assert not val.ok


def test_catalog_sets_kinds(plane, sphere2, gauss_line):
    for sp in (plane, sphere2, gauss_line):
        sets = catalog_sets(sp)
        assert len(sets) == 10 and all(s.mask.any() for s in sets)


def test_jubileo_constants(plane, sphere2, p_plane, p_sphere):
    assert jubileo_constant(p_plane, plane) == pytest.approx(0.5, rel=1e-12)
    # sup_{r <= pi/2} tan(r/2)/r = 2/pi
    assert jubileo_constant(p_sphere, sphere2) == pytest.approx(2 / math.pi, rel=1e-3)
