import numpy as np
import pytest
from hypothesis import given, strategies as st

from bochner.cell_metric import R_D_sym
from bochner.classification import classify_cells
from bochner.errors import DomainError, ParameterError
from bochner.explicit_metrics import (
    LeafChart, RotSymParams, RotSymProfile, dim1_band_periods, dim1_equal_period_scan, dim1_from_roots,
    dim1_orbifold_roots, dim1_suite, fubini_study, grho_inverse, grho_metric, grho_s, leaf_metric,
    reduction_metric, rotsym_arclength, rotsym_domain, rotsym_metric, rotsym_momentum_poly, rotsym_profile,
    wps_metric, wps_s)
from bochner.polynomial import RealPolynomial


def posdef(G):
    return np.allclose(G, G.conj().T, atol=1e-12) and np.linalg.eigvalsh(G).min() > 0


# -- rotationally symmetric ------------------------------------------------------------

@pytest.mark.parametrize("k", [8.0, 1.0, -1.0, -3.0])
def test_zero_a_profile(k):
    p = RotSymParams(2, k, 0.0)
    for t in [0.01, 0.05, 0.1]:
        if k > 0 and t >= 1 / k:
            continue
        x, fp = rotsym_profile(p, t)
        assert x == pytest.approx(t / (1 - k * t), rel=1e-12)
        assert fp == pytest.approx(1 / (1 - k * t), rel=1e-12)


def test_domains():
    assert rotsym_domain(RotSymParams(2, 8.0, 0.0)) == (0.0, pytest.approx(1 / 8))
    assert rotsym_domain(RotSymParams(2, -1.0, 0.0))[1] == np.inf
    assert rotsym_domain(RotSymParams(2, 8.0, 1.0))[1] == pytest.approx(0.11870561895875927 ** 1, rel=1e-9)
    with pytest.raises(DomainError):
        rotsym_profile(RotSymParams(2, 8.0, 0.0), 0.2)


def test_metric_is_identity_at_origin():
    for prm in [RotSymParams(2, 8.0, 0.0), RotSymParams(3, -2.0, 1.0), RotSymParams(2, 4.0, 0.5)]:
        assert np.allclose(rotsym_metric(prm)(np.zeros(prm.n)), np.eye(prm.n))


def test_double_root_quadratic_maps_into_unit_interval():
    prof = RotSymProfile(RotSymParams(2, -2.0, 1.0))
    xs = [prof.x(t) for t in [1e-3, 0.1, 1.0, 10.0, 1e3]]
    assert all(0 < x < 1 for x in xs) and xs == sorted(xs)
    assert prof.domain()[1] == np.inf


def test_type_two_parameters():
    with pytest.raises(ParameterError):
        RotSymParams(2, -1.0, 1.0, "type_two")
    prof = RotSymProfile(RotSymParams(2, -3.0, 1.0, "type_two"))
    assert prof.domain() == (0.0, 1.0)
    x = prof.x(0.5)
    # t x' = x q(x) solved implicitly: check it with a difference quotient
    h = 1e-6
    dx = (prof.x(0.5 + h) - prof.x(0.5 - h)) / (2 * h)
    assert 0.5 * dx == pytest.approx(x * (1 - 3 * x + x * x), rel=1e-6)


@pytest.mark.parametrize("prm", [RotSymParams(2, 8.0, 1.0), RotSymParams(3, -2.0, 1.0), RotSymParams(2, 4.0, 0.5)])
def test_profile_solves_ode(prm):
    prof = RotSymProfile(prm)
    for t in [0.02, 0.05, 0.09]:
        x = prof.x(t)
        h = 1e-7
        dx = (prof.x(t + h) - prof.x(t - h)) / (2 * h)
        assert t * dx == pytest.approx(x * (1 + prm.k * x + prm.a * x * x), rel=1e-6)


@given(st.floats(0.3, 3.0), st.floats(0.005, 0.05))
def test_scaling_coherence(lam, t):
    base = RotSymParams(2, 4.0, 0.5)
    scaled = RotSymParams(2, lam * 4.0, lam * lam * 0.5)
    if lam * t >= rotsym_domain(base)[1]:
        return
    x, _ = rotsym_profile(base, lam * t)
    y, _ = rotsym_profile(scaled, t)
    assert y == pytest.approx(x / lam, rel=1e-9)
    a = np.sort(rotsym_momentum_poly(base, [np.sqrt(lam * t), 0]).root_values())
    b = np.sort(rotsym_momentum_poly(scaled, [np.sqrt(t), 0]).root_values())
    assert np.allclose(b, lam * a, rtol=1e-9)


def test_radial_distance_quarter_circle():
    assert rotsym_arclength(RotSymParams(2, -1.0, 0.0), 0.0, np.inf) == pytest.approx(np.pi / 2, rel=1e-8)
    assert rotsym_arclength(RotSymParams(2, -1.0, 0.0), 0.3, 0.3) == 0.0


# -- g_rho -------------------------------------------------------------------------------

def test_grho_s_examples():
    assert grho_s([0, 0], [1, 2]) == 0.0
    z = np.array([0.6 + 0.2j, -0.3j])
    assert grho_s(z, [0, 0]) == pytest.approx(np.sum(np.abs(z) ** 2))
    s = grho_s(z, [1, 2])
    assert s == pytest.approx(np.sum(np.exp(-np.array([1, 2]) * s) * np.abs(z) ** 2), rel=1e-14)
    with pytest.raises(ParameterError):
        grho_s(z, [-1, 2])


def test_grho_flat_and_inverse():
    z = np.array([0.6 + 0.2j, -0.3j])
    assert np.allclose(grho_metric([0, 0])(z), np.eye(2))
    G = grho_metric([1, 2])(z)
    assert np.allclose(G @ grho_inverse(z, [1, 2]), np.eye(2))
    assert posdef(G)


@given(st.lists(st.floats(-3, 3), min_size=4, max_size=4))
def test_grho_positive(xs):
    z = np.array([xs[0] + 1j * xs[1], xs[2] + 1j * xs[3]])
    assert posdef(grho_metric([1.0, 2.0])(z))


# -- weighted projective -----------------------------------------------------------------

def test_equal_weights_give_fubini_study(rng):
    for _ in range(5):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        assert np.allclose(wps_metric([1, 1, 1])(z), fubini_study(z), atol=1e-12)


def test_wps_s_closed_form():
    for r2 in [0.1, 1.0, 9.0]:
        s = wps_s([np.sqrt(r2)], [1, 2])
        assert s == pytest.approx((-1 + np.sqrt(1 + 4 * r2)) / (2 * r2), rel=1e-13)
    assert wps_s([0, 0], [1, 2, 3]) == 1.0


def test_wps_positive_definite(rng):
    for _ in range(10):
        z = 2 * (rng.normal(size=2) + 1j * rng.normal(size=2))
        assert posdef(wps_metric([1, 2, 3])(z))
    assert posdef(wps_metric([1, 2, 3])([0.7, 0]))
    with pytest.raises(ParameterError):
        wps_metric([1])


def test_reduction_chart():
    with pytest.raises(ParameterError):
        reduction_metric([2, 1, 1])
    assert posdef(reduction_metric([1, 2, 3])(np.array([0.5, 0.3j])))


# -- leaf chart --------------------------------------------------------------------------

P_D = RealPolynomial.from_roots([(2.0, 1), (0.5, 1), (-1.0, 1), (-2.5, 1)])


def test_leaf_chart_hessian_and_legendre(rng):
    cell = next(c for c in classify_cells(P_D) if c.tag == "4-0")
    u0 = np.array([-1.9, 0.34])
    g, chart = leaf_metric(cell, u0)
    assert np.allclose(chart.hess_G(u0), R_D_sym(P_D, u0, cell).matrix, atol=1e-12)
    assert np.allclose(g[2:, 2:] @ g[:2, :2], np.eye(2))
    for du in rng.normal(scale=0.05, size=(5, 2)):
        u = u0 + du
        assert np.allclose(chart.legendre_inverse(chart.grad_G(u)), u, atol=1e-10)
    G = chart.metric()(chart.grad_G(u0) + 0.4j)
    assert np.allclose(G, np.linalg.inv(chart.hess_G(u0)))


def test_leaf_chart_needs_simple_roots():
    p = RealPolynomial.from_roots([(1.0, 2), (0.0, 1), (-1.0, 1)])
    with pytest.raises(ParameterError):
        LeafChart(classify_cells(p)[0], [0.5, -0.5])


# -- dimension one -----------------------------------------------------------------------

@pytest.mark.parametrize("C2,C3,case", [(-1, 0, "4"), (1, 0, "1"), (0, 0, "2"), (-3, 2, "3-1"), (-3, -2, "3-2")])
def test_dim1_cases(C2, C3, case):
    assert dim1_suite(C2, C3).case == case


def test_dim1_periods():
    fam = dim1_suite(-1, 0)
    assert fam.periods[1.0] == pytest.approx(np.pi / 2)
    assert dim1_suite(-3, 2).periods[-2.0] == pytest.approx(np.pi / 9)
    assert fam.components == [(1.0, np.inf, "unbounded"), (-1.0, 0.0, "bounded")]
    for r in [1.0, 0.0, -1.0]:
        assert fam.cone_period(r) == pytest.approx(fam.periods[r], rel=1e-6)


@pytest.mark.parametrize("H", [-0.7, -0.3, 1.5, 3.0])
def test_dim1_gaussian_curvature(H):
    assert dim1_suite(-1, 0).gaussian_curvature(H) == pytest.approx(-12 * H, rel=1e-7)
    with pytest.raises(DomainError):
        dim1_suite(-1, 0).metric(0.5)


def test_dim1_equal_periods_never_occur():
    count, gap, zero = dim1_equal_period_scan()
    assert count > 0 and gap > 0 and not zero
    t1, t2 = dim1_band_periods(*dim1_orbifold_roots(1.0, 2, 3))
    assert t1 / t2 == pytest.approx(3 / 2)
    t1, t2 = dim1_band_periods(-0.5, -1.5)
    assert (t1, t2) == (pytest.approx(np.pi / 2.5), pytest.approx(np.pi / 3.5))
    fam = dim1_from_roots(*dim1_orbifold_roots(1.0, 2, 3))
    assert fam.case == "4"


@pytest.mark.parametrize("field,radius", [
    (rotsym_metric(RotSymParams(2, 8.0, 0.0)), 0.35),
    (rotsym_metric(RotSymParams(2, -2.0, 1.0)), 5.0),
    (rotsym_metric(RotSymParams(2, 8.0, 1.0)), 0.34),
    (rotsym_metric(RotSymParams(2, -3.0, 1.0, "type_two")), 0.99),
    (grho_metric([1.0, 2.0]), 3.0),
    (wps_metric([1, 2, 3]), 3.0),
    (reduction_metric([1, 1, 2]), 2.0)])
def test_positive_definite_on_random_domain_points(field, radius, rng):
    seen = 0
    while seen < 100:
        z = radius * (rng.uniform(-1, 1, size=2) + 1j * rng.uniform(-1, 1, size=2))
        if not field.domain(z) or (field.params.get("branch") == "type_two" and np.vdot(z, z).real < 0.01):
            continue
        assert posdef(field(z))
        seen += 1
