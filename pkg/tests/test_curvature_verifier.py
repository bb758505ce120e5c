import numpy as np
import pytest

from bochner.classification import classify_cells
from bochner.curvature_verifier import (
    CALIBRATION, bochner_residual, calibrate, curvature_report, extract_momentum, holo_sect_curvature,
    kahler_curvature, momentum_from_S, ricci_eigenvalues, ricci_scalar)
from bochner.errors import DomainError, ParameterError
from bochner.explicit_metrics import (
    LeafChart, MetricField, RotSymParams, grho_metric, reduction_metric, rotsym_metric, rotsym_momentum_poly,
    rotsym_ricci_eigs, wps_metric)
from bochner.polynomial import RealPolynomial

FLAT = MetricField(2, lambda z: np.eye(2, dtype=complex), name="flat")


def random_points(rng, count, radius, q=2):
    pts = []
    while len(pts) < count:
        z = rng.uniform(-radius, radius, size=q) + 1j * rng.uniform(-radius, radius, size=q)
        if np.linalg.norm(z) <= radius:
            pts.append(z)
    return pts


def test_calibration_is_reproduced():
    cal, flat_norm = calibrate()
    assert cal == CALIBRATION
    assert flat_norm < 1e-10


def test_flat():
    rep = curvature_report(FLAT, [0.3 - 0.1j, 0.5j])
    assert np.linalg.norm(rep.R) < 1e-10 and rep.scalar == pytest.approx(0, abs=1e-10)
    assert rep.bochner_residual < 1e-10 and np.allclose(rep.S_fit, 0, atol=1e-10)
    assert np.allclose(rep.p_h_extracted.coeffs, [1, 0, 0], atol=1e-10)
    assert holo_sect_curvature(rep.R, rep.G, [1, 1j]) == pytest.approx(0, abs=1e-10)


def test_space_form_ricci_and_momentum():
    field = rotsym_metric(RotSymParams(2, 8.0, 0.0))
    R, G = kahler_curvature(field, [0, 0])
    ric, _ = ricci_scalar(R, G)
    assert np.allclose(ricci_eigenvalues(ric, G), [-48, -48], atol=1e-6)
    for z in [[0, 0], [0.1, 0.2j], [-0.15 + 0.1j, 0.05]]:
        _, p_h, _ = extract_momentum(field, z)
        assert np.allclose(p_h.coeffs, [1, -4, 4], atol=1e-5)


@pytest.mark.parametrize("n,k,a", [(2, 8.0, 0.0), (2, -8.0, 1.0), (3, 4.0, 0.5)])
def test_rotsym_against_closed_form(n, k, a):
    prm = RotSymParams(n, k, a)
    field = rotsym_metric(prm)
    for r in [0.3, 0.8]:
        z = np.zeros(n, dtype=complex)
        z[0] = r * np.exp(0.4j)
        z[-1] += 0.1
        if not field.domain(z):
            continue
        rep = curvature_report(field, z)
        assert rep.bochner_residual < 1e-4
        assert rep.symmetry_defect < 1e-6 and rep.kahler_defect < 1e-6
        l1, l2 = rotsym_ricci_eigs(prm, z)
        want = np.sort([l1] * (n - 1) + [l2])
        assert np.allclose(np.sort(rep.ricci_eigs), want, rtol=1e-4, atol=1e-4)
        want_ph = rotsym_momentum_poly(prm, z)
        assert np.allclose(rep.p_h_extracted.coeffs, want_ph.coeffs, atol=1e-4 * (1 + abs(k)) ** n)


def test_type_two_branch_away_from_the_centre():
    prm = RotSymParams(2, -3.0, 1.0, "type_two")
    z = np.array([0.8, 0.0])
    rep = curvature_report(rotsym_metric(prm), z)
    assert rep.bochner_residual < 1e-4
    assert np.allclose(np.sort(rep.ricci_eigs), np.sort(rotsym_ricci_eigs(prm, z)), rtol=1e-4)


def test_large_radius_trend():
    prm = RotSymParams(2, -2.0, 1.0)
    field = rotsym_metric(prm)
    gaps = []
    for t in [1.0, 10.0, 100.0, 1000.0]:
        z = np.array([np.sqrt(t), 0])
        eig = np.sort(curvature_report(field, z).ricci_eigs)
        assert np.allclose(eig, np.sort(rotsym_ricci_eigs(prm, z)), rtol=1e-5)
        gaps.append(np.max(np.abs(eig - [-4, 4])))     # limits 2n and -4
    assert gaps == sorted(gaps, reverse=True)


def test_grho_is_bochner_flat(rng):
    field = grho_metric([1.0, 2.0])
    for z in random_points(rng, 20, 2.0):
        rep = curvature_report(field, z)
        assert rep.bochner_residual < 1e-4
        assert rep.symmetry_defect < 1e-6
        assert np.allclose(momentum_from_S(rep.S_fit, rep.G), rep.H_fit, atol=1e-4)
        h1 = -rep.p_h_extracted.coeffs[1]
        assert rep.scalar == pytest.approx(-24 * h1, rel=1e-3, abs=1e-6)


def test_injected_defect_is_detected():
    eps = 1e-2

    def bumped(z):
        return np.eye(2, dtype=complex) + eps * np.diag([4 * abs(z[0]) ** 2, 0])

    field = MetricField(2, bumped, name="bump")
    _, res = bochner_residual(*kahler_curvature(field, [0.5 + 0.2j, 0.1]))
    assert res > 1e-3


def test_fubini_study_is_einstein_and_isotropic(rng):
    field = wps_metric([1, 1, 1])
    z = np.array([0.4 + 0.3j, -0.2j])
    rep = curvature_report(field, z)
    c = np.trace(np.linalg.solve(rep.G, rep.ricci)).real / 2
    assert np.linalg.norm(rep.ricci - c * rep.G) / np.linalg.norm(rep.ricci) < 1e-4
    vals = [holo_sect_curvature(rep.R, rep.G, rng.normal(size=2) + 1j * rng.normal(size=2)) for _ in range(6)]
    assert np.ptp(vals) < 1e-4
    assert curvature_report(wps_metric([1, 2, 3]), z).bochner_residual < 1e-4


def test_holomorphic_sectional_curvature_of_space_form():
    field = rotsym_metric(RotSymParams(2, 3.0, 0.0))
    for z in [[0, 0], [0.2, 0.1j], [-0.3j, 0.25]]:
        R, G = kahler_curvature(field, z)
        for v in [[1, 0], [0.3, 1j], [1 - 1j, 2]]:
            assert holo_sect_curvature(R, G, v) == pytest.approx(-6.0, rel=1e-4)
    with pytest.raises(ParameterError):
        holo_sect_curvature(R, G, [0, 0])


def test_reduction_negative_control():
    z = np.array([0.4 + 0.1j, 0.3j])
    _, equal = bochner_residual(*kahler_curvature(reduction_metric([1, 1, 1]), z))
    _, skew = bochner_residual(*kahler_curvature(reduction_metric([1, 1, 2]), z))
    assert equal < 1e-4
    assert skew > 1e-2


def test_leaf_chart_field_in_dimension_one():
    p_D = RealPolynomial.from_roots([(1.0, 1), (0.0, 1), (-1.0, 1)])
    cell = next(c for c in classify_cells(p_D) if c.tag == "4-0")
    chart = LeafChart(cell, [-0.5])
    field = chart.metric()
    z = chart.grad_G([-0.5]) + 0.3j
    rep = curvature_report(field, z)
    assert rep.bochner_residual < 1e-3
    # single complex dimension: Gaussian curvature -12H with H the momentum coordinate
    K = 2 * rep.ricci[0, 0].real / rep.G[0, 0].real
    assert K == pytest.approx(-12 * -0.5, rel=1e-4)


def test_step_too_large_for_domain():
    field = rotsym_metric(RotSymParams(2, 8.0, 0.0))
    with pytest.raises(DomainError, match="step"):
        kahler_curvature(field, [0.35, 0], step=0.05)
