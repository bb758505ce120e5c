import numpy as np
import pytest
from hypothesis import given, strategies as st

from bochner.cell_metric import (
    R_D_faces, R_D_sym, R_case31, S_form_roots, arc_length_diag, case31_coordinates, classical_sum_expected,
    classical_sums, face_functionals, grid_rows, potential_G, resolution_Rrho, resolution_map, sigma_jacobian)
from bochner.classification import cell_membership, classify_cells, sigma
from bochner.errors import DomainError, ParameterError, SingularError
from bochner.polynomial import RealPolynomial

CUBIC = RealPolynomial.from_roots([(1.0, 1), (0.0, 1), (-1.0, 1)])


def cell(p_D, tag):
    return next(c for c in classify_cells(p_D) if c.tag == tag)


def interior_point(c, rng):
    """sigma of a random point of the open band product."""
    y = []
    for b in c.bands:
        lo = b.lo if np.isfinite(b.lo) else b.hi - 3.0
        hi = b.hi if np.isfinite(b.hi) else b.lo + 3.0
        y.append(lo + (hi - lo) * rng.uniform(0.1, 0.9))
    return sigma(np.array(y))


def simple_roots(rng, count):
    r = np.sort(rng.uniform(-3, 3, size=count))[::-1]
    return r + np.arange(count)[::-1] * 0.3     # keep them separated


# -- faces and classical sums --------------------------------------------------

def test_cubic_face_functionals():
    f = face_functionals(CUBIC)
    assert [x.root for x in f] == [1.0, 0.0, -1.0]
    assert np.allclose(f[0].coeffs, [-0.5, 0.5]) and np.allclose(f[1].coeffs, [0, -1])
    assert np.allclose(f[2].coeffs, [0.5, 0.5])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_linear_relations_among_faces(m, rng):
    roots = simple_roots(rng, m + 2)
    p_D = RealPolynomial.from_roots([(r, 1) for r in roots])
    C = np.array([f.coeffs for f in face_functionals(p_D)])
    assert np.allclose(C.sum(axis=0), 0, atol=1e-10)
    want = np.zeros(m + 1)
    want[0] = -1
    assert np.allclose(roots @ C, want, atol=1e-10)


def test_face_pullback_through_sigma(rng):
    roots = simple_roots(rng, 4)
    p_D = RealPolynomial.from_roots([(r, 1) for r in roots])
    y = rng.normal(size=2)
    for f in face_functionals(p_D):
        others = [r for r in roots if r != f.root]
        want = np.prod(y - f.root) / np.prod(np.array(others) - f.root)
        assert f(sigma(y)) == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_faces_reject_multiple_root():
    p_D = RealPolynomial.from_roots([(1.0, 2), (-2.0, 1)])
    with pytest.raises(ParameterError):
        face_functionals(p_D, [1.0])


def test_classical_sum_examples():
    assert classical_sums([1, 0, -1], 0) == pytest.approx(0)
    assert classical_sums([1, 0, -1], 1) == pytest.approx(0)
    assert classical_sums([1, 0, -1], 2) == pytest.approx(1)
    with pytest.raises(ParameterError):
        classical_sums([1, 0, -1], 4)
    with pytest.raises(ParameterError):
        classical_sums([1, 0, -1], -1)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_classical_sums_pattern(seed, m):
    roots = simple_roots(np.random.default_rng(seed), m + 2)
    roots = roots[np.abs(roots) > 0.05] if np.all(np.abs(roots) > 0.05) else roots + 0.17
    for k in range(-1, m + 3):
        assert classical_sums(roots, k) == pytest.approx(classical_sum_expected(roots, k), abs=1e-10)


# -- the metric in its charts ---------------------------------------------------------

def test_root_form_example():
    S = S_form_roots(CUBIC, [-0.5])
    assert S.matrix[0, 0] == pytest.approx(2 / 3)
    with pytest.raises(SingularError):
        S_form_roots(CUBIC, [0.0])


def test_m1_collapse_and_face_values():
    c = cell(CUBIC, "4-0")
    for u in [-0.9, -0.5, -0.1]:
        assert R_D_sym(CUBIC, [u], c).matrix[0, 0] == pytest.approx(1 / (4 * CUBIC(u)))
    assert R_D_faces(CUBIC, [-0.5]).matrix[0, 0] == pytest.approx(2 / 3)
    assert [f([-0.5]) for f in face_functionals(CUBIC)] == pytest.approx([-0.75, 0.5, 0.25])


@pytest.mark.parametrize("m", [1, 2, 3])
def test_symmetric_chart_equals_face_chart(m, rng):
    roots = simple_roots(rng, m + 2)
    p_D = RealPolynomial.from_roots([(r, 1) for r in roots])
    for c in classify_cells(p_D):
        for _ in range(50 // (m + 1) + 1):
            u = interior_point(c, rng)
            A = R_D_sym(p_D, u, c).matrix
            B = R_D_faces(p_D, u).matrix
            assert np.allclose(A, B, rtol=1e-9, atol=1e-9 * np.max(np.abs(A)))
            assert R_D_sym(p_D, u, c).is_positive_definite()


def test_root_chart_pullback(rng):
    p_D = RealPolynomial.from_roots([(2.0, 1), (0.5, 1), (-1.0, 1), (-2.5, 1)])
    c = cell(p_D, "4-0")
    y = np.array([-0.2, -1.7])
    J = sigma_jacobian(y)
    R = R_D_sym(p_D, sigma(y), c).matrix
    assert np.allclose(J.T @ R @ J, S_form_roots(p_D, y).matrix, atol=1e-12)


def test_hessian_of_potential(rng):
    p_D = RealPolynomial.from_roots([(2.0, 1), (0.5, 1), (-1.0, 1), (-2.5, 1)])
    h = 1e-4
    for c in classify_cells(p_D):
        for _ in range(4):
            u = interior_point(c, rng)
            Hs = np.zeros((2, 2))
            for i in range(2):
                for j in range(2):
                    ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
                    Hs[i, j] = (potential_G(p_D, u + ei + ej) - potential_G(p_D, u + ei - ej)
                                - potential_G(p_D, u - ei + ej) + potential_G(p_D, u - ei - ej)) / (4 * h * h)
            R = R_D_sym(p_D, u, c).matrix
            assert np.allclose(Hs, R, atol=1e-5 * (1 + np.max(np.abs(R))))


def test_face_signs_on_compact_cell(rng):
    p_D = RealPolynomial.from_roots([(2.0, 1), (0.5, 1), (-1.0, 1), (-2.5, 1)])
    c = cell(p_D, "4-0")
    faces = face_functionals(p_D)
    for _ in range(20):
        ls = [f(interior_point(c, rng)) for f in faces]
        assert ls[0] <= 0 and all(x >= 0 for x in ls[1:])


def test_boundary_rejected():
    c = cell(CUBIC, "4-0")
    with pytest.raises(DomainError):
        R_D_sym(CUBIC, [0.0], c)
    with pytest.raises(DomainError):
        R_D_faces(CUBIC, [0.0])


# -- double largest root -------------------------------------------------------------

DOUBLE = RealPolynomial.from_roots([(1.0, 2), (0.0, 1), (-1.0, 1)])


def test_case31_is_the_limit_of_separating_roots(rng):
    c = cell(DOUBLE, "3-1b")
    u = interior_point(c, rng)
    target = R_case31(DOUBLE, u).matrix
    eps = 1e-4
    split = RealPolynomial.from_roots([(1.0 + eps, 1), (1.0, 1), (0.0, 1), (-1.0, 1)])
    near = R_D_faces(split, u).matrix
    assert np.allclose(near, target, rtol=1e-3, atol=1e-3 * np.max(np.abs(target)))
    assert R_case31(DOUBLE, u).is_positive_definite()


def test_case31_m1_collapse():
    p_D = RealPolynomial.from_roots([(1.0, 2), (-2.0, 1)])
    for u in [-1.5, 0.0, 0.9]:
        assert R_case31(p_D, [u]).matrix[0, 0] == pytest.approx(1 / (4 * p_D(u)))


def test_resolution_flat_cases():
    assert np.allclose(resolution_Rrho([0, 0], [0.3, -0.8]).matrix, np.eye(2))
    assert np.allclose(resolution_Rrho([1, 2], [0, 0]).matrix, np.eye(2))
    with pytest.raises(DomainError):
        resolution_Rrho([1, 2], [1, 1])


def test_resolution_pulls_back_case31(rng):
    for _ in range(5):
        p = rng.uniform(0.1, 0.4, size=2) * rng.choice([-1, 1], size=2)
        u = resolution_map(DOUBLE, p)
        h = 1e-6
        J = np.column_stack([(resolution_map(DOUBLE, p + h * e) - resolution_map(DOUBLE, p - h * e)) / (2 * h)
                             for e in np.eye(2)])
        pulled = J.T @ R_case31(DOUBLE, u).matrix @ J
        assert np.allclose(pulled, resolution_Rrho([1.0, 2.0], p).matrix, atol=1e-7)
        a, t = case31_coordinates(DOUBLE, u)
        assert a == pytest.approx(1 - 1.0 * p[0] ** 2 - 2.0 * p[1] ** 2)
        assert t == pytest.approx(p @ p)


def test_resolution_positive_definite_up_to_the_rim():
    rho = np.array([1.0, 2.0])
    for r in np.linspace(0, np.sqrt(1 - 1e-3), 25):
        for th in np.linspace(0, 2 * np.pi, 13):
            p = r * np.array([np.cos(th), np.sin(th)]) / np.sqrt(rho)
            assert resolution_Rrho(rho, p).is_positive_definite()


# -- arc length ----------------------------------------------------------------------

def test_unbounded_band_length_is_finite():
    from scipy import integrate
    p_D = RealPolynomial(np.polymul([1, -1], [1, 0, 1]))      # (t - 1)(t^2 + 1), Case 1
    c = classify_cells(p_D)[0]
    L = arc_length_diag(c, [1.0], [np.inf])
    want = integrate.quad(lambda x: 1 / (2 * np.sqrt(p_D(x))), 1, np.inf)[0]
    assert L == pytest.approx(want, rel=1e-6)
    assert arc_length_diag(c, [1.0], [np.inf], cap=160) == pytest.approx(L, rel=1e-8)


def test_degenerate_segment():
    assert arc_length_diag(cell(CUBIC, "4-0"), [-0.5], [-0.5]) == 0.0


def test_double_root_end_diverges():
    p_D = RealPolynomial.from_roots([(1.0, 2), (-2.0, 1)])
    c = cell(p_D, "3-1b")
    L1 = arc_length_diag(c, [0.0], [1.0], cap=40)
    L2 = arc_length_diag(c, [0.0], [1.0], cap=80)
    assert L2 - L1 > 5.0
    with pytest.raises(DomainError):
        arc_length_diag(c, [0.0], [1.5])


def test_grid_export_rows():
    c = cell(CUBIC, "4-0")
    rows = grid_rows(CUBIC, c, [[-0.5], [0.0], [0.5]])
    assert len(rows) == 1 and rows[0][1] == pytest.approx(2 / 3)
