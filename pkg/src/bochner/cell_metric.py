"""The canonical metric R_D on the interior of a momentum cell.

Three charts are available: spectral coordinates y (where the metric is
diagonal), symmetric coordinates u = sigma(y), and, when every root of p_D is
real and simple, the face functionals l_a, in which R_D = sum dl_a^2 / (4 l_a)
is the Hessian of G = 1/4 sum l_a (log|l_a| - 1).
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .classification import cell_membership, lam, sigma
from .config import DEFAULT
from .errors import DomainError, InvalidPolynomialError, ParameterError, SingularError


@dataclass(frozen=True)
class QuadraticFormEval:
    point: np.ndarray
    matrix: np.ndarray

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def is_positive_definite(self):
        return bool(np.all(self.eigenvalues() > 0))

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        return float(v @ self.matrix @ v)


@dataclass(frozen=True)
class FaceFunctional:
    """l(u) = c[0] + c[1] u_1 + ... + c[m] u_m, attached to a simple root."""
    root: float
    coeffs: np.ndarray

    def __call__(self, u):
        return float(self.coeffs[0] + np.dot(self.coeffs[1:], u))

    @property
    def grad(self):
        return self.coeffs[1:]


# ---------------------------------------------------------------------------
# faces and classical identities

def _simple_real_roots(p_D):
    return [r for r, k in p_D.real_roots() if k == 1]


def face_functionals(p_D, roots=None):
    m = p_D.degree - 2
    if roots is None:
        roots = _simple_real_roots(p_D)
    d1 = p_D.deriv(1)
    out = []
    for r in roots:
        if p_D.multiplicity(r) != 1:
            raise ParameterError(f"face functionals exist only at simple roots; {r} is not one")
        c = np.array([r ** m] + [(-1) ** j * r ** (m - j) for j in range(1, m + 1)])
        out.append(FaceFunctional(float(r), -c / np.polyval(d1, r)))
    return out


def classical_sums(roots, k):
    roots = np.asarray(roots, dtype=float)
    N = len(roots)
    if not -1 <= k <= N:
        raise ParameterError(f"k = {k} outside [-1, {N}]")
    if k == -1 and np.any(roots == 0):
        raise ParameterError("k = -1 needs nonzero roots")
    total = 0.0
    for a in range(N):
        dp = np.prod(roots[a] - np.delete(roots, a))
        total += roots[a] ** k / dp
    return total


def classical_sum_expected(roots, k):
    N = len(roots)
    if k == -1:
        return (-1) ** (N - 1) / float(np.prod(roots))
    if k <= N - 2:
        return 0.0
    if k == N - 1:
        return 1.0
    return float(np.sum(roots))


# ---------------------------------------------------------------------------
# spectral and symmetric charts

def S_form_roots(p_D, y):
    y = np.asarray(y, dtype=float)
    m = len(y)
    diag = np.empty(m)
    for i in range(m):
        others = np.delete(y, i)
        gaps = y[i] - others
        pv = p_D(y[i])
        if np.any(gaps == 0) or pv == 0:
            raise SingularError("coincident spectral values or a root of p_D")
        diag[i] = 0.25 * np.prod(gaps) / pv
    return QuadraticFormEval(y, np.diag(diag))


def sigma_jacobian(y):
    """J[k, i] = d sigma_{k+1} / d y_i = sigma_k of the other entries."""
    y = np.asarray(y, dtype=float)
    m = len(y)
    J = np.empty((m, m))
    for i in range(m):
        rest = sigma(np.delete(y, i))
        J[:, i] = np.concatenate([[1.0], rest])
    return J


def R_D_sym(p_D, u, cell, tol=DEFAULT):
    u = np.asarray(u, dtype=float)
    if cell_membership(cell, u, tol) != "interior":
        raise DomainError("R_D is evaluated on the cell interior only")
    y = lam(u, tol)
    S = S_form_roots(p_D, y).matrix
    Jinv = np.linalg.inv(sigma_jacobian(y))
    R = Jinv.T @ S @ Jinv
    return QuadraticFormEval(u, 0.5 * (R + R.T))


def _all_simple_real(p_D):
    real = p_D.real_roots()
    if len(real) != p_D.degree or any(k != 1 for _, k in real):
        raise InvalidPolynomialError("face chart needs all roots of p_D real and simple")
    return [r for r, _ in real]


def _guard(ls, u):
    if min(abs(x) for x in ls) < 1e-12 * (1 + np.linalg.norm(u)):
        raise DomainError("a face functional vanishes: boundary singularity")


def R_D_faces(p_D, u):
    u = np.asarray(u, dtype=float)
    faces = face_functionals(p_D, _all_simple_real(p_D))
    ls = [f(u) for f in faces]
    _guard(ls, u)
    R = sum(np.outer(f.grad, f.grad) / (4 * l) for f, l in zip(faces, ls))
    return QuadraticFormEval(u, R)


def potential_G(p_D, u):
    u = np.asarray(u, dtype=float)
    faces = face_functionals(p_D, _all_simple_real(p_D))
    ls = [f(u) for f in faces]
    _guard(ls, u)
    return 0.25 * sum(l * (np.log(abs(l)) - 1) for l in ls)


def potential_gradient(p_D, u):
    u = np.asarray(u, dtype=float)
    faces = face_functionals(p_D, _all_simple_real(p_D))
    ls = [f(u) for f in faces]
    _guard(ls, u)
    return 0.25 * sum(f.grad * np.log(abs(l)) for f, l in zip(faces, ls))


# ---------------------------------------------------------------------------
# double largest root

def _case31_parts(p_D):
    real = p_D.real_roots()
    m = p_D.degree - 2
    if len(real) != m + 1 or real[0][1] != 2 or any(k != 1 for _, k in real[1:]):
        raise InvalidPolynomialError("expected r_1 double and the remaining m roots simple")
    r1 = real[0][0]
    return r1, face_functionals(p_D, [r for r, _ in real[1:]])


def case31_coordinates(p_D, u):
    """(a, t) with a = 1 - sum (r_1 - r_a) l_a and t = sum l_a over the simple roots."""
    r1, faces = _case31_parts(p_D)
    ls = np.array([f(u) for f in faces])
    rho = np.array([r1 - f.root for f in faces])
    return 1.0 - float(rho @ ls), float(ls.sum())


def R_case31(p_D, u):
    u = np.asarray(u, dtype=float)
    r1, faces = _case31_parts(p_D)
    ls = [f(u) for f in faces]
    a = 1.0 - sum((r1 - f.root) * l for f, l in zip(faces, ls))
    if a <= 0:
        raise DomainError("a <= 0: outside the double-root cell")
    _guard(ls, u)
    t = sum(ls)
    da = -sum((r1 - f.root) * f.grad for f in faces)
    dt = sum(f.grad for f in faces)
    R = t * np.outer(da, da) / (4 * a * a) - (np.outer(da, dt) + np.outer(dt, da)) / (4 * a)
    R = R + sum(np.outer(f.grad, f.grad) / (4 * l) for f, l in zip(faces, ls))
    return QuadraticFormEval(u, R)


def resolution_Rrho(rho, p):
    rho = np.asarray(rho, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(rho < 0):
        raise ParameterError("rho must be non-negative")
    a = 1.0 - float(rho @ (p * p))
    if a <= 0:
        raise DomainError("point outside the ellipsoid sum rho p^2 < 1")
    t = float(p @ p)
    da = -2 * rho * p
    dt = 2 * p
    R = t * np.outer(da, da) / (4 * a * a) - (np.outer(da, dt) + np.outer(dt, da)) / (4 * a) + np.eye(len(p))
    return QuadraticFormEval(p, R)


def resolution_map(p_D, p):
    """u with l_a(u) = p_a^2 for the simple roots of a double-largest-root p_D."""
    _, faces = _case31_parts(p_D)
    A = np.array([f.grad for f in faces])
    b = np.array([pa * pa - f.coeffs[0] for f, pa in zip(faces, p)])
    return np.linalg.solve(A, b)


# ---------------------------------------------------------------------------
# arc length in spectral coordinates

def _closure_ok(cell, y, atol=1e-9):
    for yi, band in zip(y, cell.bands):
        if np.isinf(yi):
            if not (yi > 0 and np.isinf(band.hi)):
                return False
        elif yi < band.lo - atol * (1 + abs(band.lo)) or yi > band.hi + atol * (1 + abs(band.hi)):
            return False
    return True


def arc_length_diag(cell, frm, to, cap=80.0):
    """R_D-length of the straight segment frm -> to in spectral coordinates.

    Endpoints may sit on band ends, including multiple roots and +inf for the
    top band.  Near each end the segment is parametrised by w = -log(distance)
    and integrated up to w = cap, so divergent lengths grow without bound in
    cap while convergent ones settle.
    """
    frm = np.asarray(frm, dtype=float)
    to = np.asarray(to, dtype=float)
    if not (_closure_ok(cell, frm) and _closure_ok(cell, to)):
        raise DomainError("segment leaves the closed spectral product")
    if np.any(np.isinf(frm)):
        frm, to = to, frm
    roots = [(complex(r), k) for r, k in cell.p_D.roots]

    def pD_at(anchor, off):
        # p_D(anchor + off); the factor of a root equal to the anchor is taken exactly
        val = 1.0 + 0j
        for r, k in roots:
            d = off if (r.imag == 0 and r.real == anchor) else (anchor - r) + off
            val *= d ** k
        return val.real

    def speed(anchor, off, dx):
        tot = 0.0
        m = len(anchor)
        for i in range(m):
            if dx[i] == 0:
                continue
            gaps = np.prod([(anchor[i] - anchor[j]) + (off[i] - off[j]) for j in range(m) if j != i])
            tot += 0.25 * gaps / pD_at(anchor[i], off[i]) * dx[i] ** 2
        return np.sqrt(max(tot, 0.0))

    if np.any(np.isinf(to)):
        moving = np.isinf(to)
        if moving.sum() != 1 or not moving[0]:
            raise DomainError("only the top spectral value may run to infinity")
        s = 1 + abs(frm[0])

        def f_inf(w):
            off = np.zeros_like(frm)
            dx = np.zeros_like(frm)
            off[0] = np.expm1(w) * s
            dx[0] = np.exp(w) * s
            return speed(frm, off, dx)
        return integrate.quad(f_inf, 0.0, cap, limit=400)[0]

    if np.all(to == frm):
        return 0.0

    def half(start, end):
        # the point at distance e^{-w} (in segment parameter) from `end`
        d = end - start
        return integrate.quad(lambda w: np.exp(-w) * speed(end, -np.exp(-w) * d, d), 0.0, cap, limit=400)[0]

    mid = 0.5 * (frm + to)
    return half(mid, to) + half(mid, frm)


def grid_rows(p_D, cell, points, tol=DEFAULT):
    """Rows (u..., R entries (upper triangle), eigenvalues...) for interior sample points."""
    rows = []
    for u in points:
        try:
            R = R_D_sym(p_D, u, cell, tol)
        except (DomainError, SingularError):
            continue
        iu = np.triu_indices(len(u))
        rows.append(list(map(float, u)) + list(map(float, R.matrix[iu])) + list(map(float, R.eigenvalues())))
    return rows
