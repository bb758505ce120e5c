"""Characteristic polynomials, momentum cells and their spectral bands.

The reduced characteristic polynomial p_D of degree m+2 falls into one of four
root patterns.  Each pattern admits a finite list of momentum cells; a cell is
a convex region of R^m cut out by one half-space per real root of p_D, and its
preimage under the elementary symmetric map is a product of intervals (bands).
"""

from dataclasses import dataclass, field
from math import gcd
from functools import reduce

import numpy as np

from .config import DEFAULT
from .errors import (DomainError, InconsistencyError, InvalidCellPointError,
                     InvalidPolynomialError, ParameterError, SingularError)
from .polynomial import RealPolynomial
from .structure_space import StructurePoint, clusters, eigen_descending


@dataclass(frozen=True)
class SpectralData:
    clusters: list

    @property
    def m(self):
        return sum(c.m for c in self.clusters)


@dataclass(frozen=True)
class Band:
    lo: float            # -inf allowed
    hi: float            # +inf allowed
    lo_closed: bool
    hi_closed: bool

    def contains(self, x, atol=0.0):
        if x < self.lo - atol or x > self.hi + atol:
            return False
        if not self.lo_closed and x <= self.lo + atol:
            return False
        if not self.hi_closed and x >= self.hi - atol:
            return False
        return True

    @property
    def bounded(self):
        return np.isfinite(self.lo) and np.isfinite(self.hi)

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:.6g}, {self.hi:.6g}{right}"


@dataclass(frozen=True)
class MomentumCell:
    p_D: RealPolynomial
    case: int
    index: int | None         # label of the triple/double root, or the 4-i subcase
    subtype: str | None       # 'a' or 'b' in the double-root case
    roots: tuple              # distinct real roots, descending
    mults: tuple
    labels: tuple             # r_0.. in the four-simple-roots case, r_1.. otherwise
    mu: tuple                 # mu[j] belongs to roots[j]
    bands: tuple
    faces: dict = field(default_factory=dict)   # label -> coefficients (c0, c1..cm) of l

    @property
    def m(self):
        return self.p_D.degree - 2

    @property
    def tag(self):
        if self.case == 1:
            return "1"
        if self.case == 2:
            return f"2-{self.index}"
        if self.case == 3:
            return f"3-{self.index}{self.subtype}"
        return f"4-{self.index}"

    @property
    def bounded(self):
        return all(b.bounded for b in self.bands)

    def face_value(self, label, u):
        c = self.faces[label]
        return c[0] + float(np.dot(c[1:], u))

    def to_record(self):
        return {"tag": self.tag, "m": self.m,
                "p_D": self.p_D.to_record(),
                "roots": [{"label": l, "value": r, "mult": k, "mu": mu}
                          for l, r, k, mu in zip(self.labels, self.roots, self.mults, self.mu)],
                "bands": [{"lo": b.lo, "hi": b.hi, "lo_closed": b.lo_closed, "hi_closed": b.hi_closed}
                          for b in self.bands],
                "faces": {str(k): list(map(float, v)) for k, v in self.faces.items()}}


@dataclass(frozen=True)
class CaseVerdict:
    bounded: bool
    completeness: str
    notes: str = ""


# ---------------------------------------------------------------------------
# polynomials of a point

def spectral_data(p, tol=DEFAULT):
    return SpectralData(clusters(p, tol))


def char_poly_pC(p):
    """det(tI - H)(t^2 + h_1 t + V) + T* adj(tI - H) T, assembled in the eigenbasis of H."""
    w, U = eigen_descending(p.H)
    t2 = np.abs(U.conj().T @ p.T) ** 2
    ph = np.poly(w) if p.n else np.array([1.0])
    out = np.polymul(ph, [1.0, float(np.sum(w)), p.V])
    for i in range(p.n):
        adj = np.poly(np.delete(w, i))
        out = np.polyadd(out, t2[i] * adj)
    return RealPolynomial(np.real(out))


def momentum_factors(p, tol=DEFAULT):
    """(p_h', p_h'') with p_h' = prod (t - H_a)^m_a and p_h'' = prod (t - H_a)^(n_a - m_a)."""
    cl = clusters(p, tol)
    hp = RealPolynomial.from_roots([(c.value, c.m) for c in cl if c.m], tol)
    hpp = RealPolynomial.from_roots([(c.value, c.mult - c.m) for c in cl if c.mult > c.m], tol)
    return hp, hpp


def reduced_polys(p, tol=DEFAULT):
    cl = clusters(p, tol)
    trH = float(np.trace(p.H).real)
    hp, hpp = momentum_factors(p, tol)
    acc = np.polymul(hp.coeffs, [1.0, trH, p.V])
    for a in cl:
        if a.T_zero:
            continue
        part = np.array([1.0])
        for b in cl:
            k = b.m - (1 if b is a else 0)
            for _ in range(k):
                part = np.polymul(part, [1.0, -b.value])
        acc = np.polyadd(acc, a.Tsq * part)
    p_D = RealPolynomial(acc, tol)
    p_C = char_poly_pC(p)
    prod = (hpp * p_D).coeffs
    scale_ = 1.0 + np.max(np.abs(p_C.coeffs))
    if np.max(np.abs(prod - p_C.coeffs)) > tol.division * scale_:
        raise InconsistencyError("p_h'' * p_D differs from p_C; eigenvalue clustering is inconsistent")
    return p_D, hpp, hp.degree


def reduced_momentum(p, tol=DEFAULT):
    """h' = coefficients (h'_1, ..., h'_m) of the momentum factor p_h'."""
    hp, _ = momentum_factors(p, tol)
    return np.array([(-1) ** j * hp.coeffs[j] for j in range(1, hp.degree + 1)])


# ---------------------------------------------------------------------------
# cells

def _root_pattern(p_D):
    m = p_D.degree - 2
    if m < 0:
        raise InvalidPolynomialError("p_D must have degree at least 2")
    real = p_D.real_roots()
    roots = tuple(r for r, _ in real)
    mults = tuple(k for _, k in real)
    d = len(roots)
    if d == m and all(k == 1 for k in mults):
        return 1, None, roots, mults
    if d == m and sorted(mults) == [1] * (m - 1) + [3]:
        return 2, mults.index(3) + 1, roots, mults
    if d == m + 1 and sorted(mults) == [1] * m + [2]:
        return 3, mults.index(2) + 1, roots, mults
    if d == m + 2 and all(k == 1 for k in mults):
        return 4, None, roots, mults
    raise InvalidPolynomialError(
        f"real root pattern {list(zip(roots, mults))} of a degree {m + 2} polynomial is not admissible")


def _bands(roots, mults, mu, m):
    out = []
    for j in range(1, m + 1):
        below = [(r, k) for r, k, u in zip(roots, mults, mu) if u >= j]
        above = [(r, k) for r, k, u in zip(roots, mults, mu) if u < j]
        lo, lk = max(below) if below else (-np.inf, 0)
        hi, hk = min(above) if above else (np.inf, 0)
        out.append(Band(lo, hi, lk == 1, hk == 1))
    return tuple(out)


def _faces(p_D, roots, mults, labels, m):
    d1 = p_D.deriv(1)
    faces = {}
    for lab, r, k in zip(labels, roots, mults):
        if k != 1:
            continue
        dp = np.polyval(d1, r)
        # l(u) = -(r^m - r^(m-1) u_1 + ... + (-1)^m u_m) / p_D'(r)
        c = np.array([r ** m] + [(-1) ** j * r ** (m - j) for j in range(1, m + 1)])
        faces[lab] = -c / dp
    return faces


def classify_cells(p_D, tol=DEFAULT):
    case, idx, roots, mults = _root_pattern(p_D)
    m = p_D.degree - 2
    first = 0 if case == 4 else 1
    labels = tuple(range(first, first + len(roots)))
    options = []
    if case in (1, 2):
        options.append((idx, None, labels))
    elif case == 3:
        base = [j if j < idx else j - 1 for j in labels]
        if idx <= m:
            options.append((idx, "a", tuple(idx if j == idx else u for j, u in zip(labels, base))))
        options.append((idx, "b", tuple(idx - 1 if j == idx else u for j, u in zip(labels, base))))
    else:
        for i in range(0, m + 1):
            options.append((i, None, tuple(j + 1 if j < i else (i if j == i else j - 1) for j in labels)))
    faces = _faces(p_D, roots, mults, labels, m)
    return [MomentumCell(p_D, case, i, sub, roots, mults, labels, tuple(mu), _bands(roots, mults, mu, m), faces)
            for i, sub, mu in options]


def _pk_value(r, k):
    m = len(k)
    return r ** m + sum((-1) ** j * r ** (m - j) * k[j - 1] for j in range(1, m + 1))


def cell_membership(cell, k, tol=DEFAULT):
    k = np.asarray(k, dtype=float)
    if len(k) != cell.m:
        raise ParameterError(f"expected {cell.m} momentum coordinates, got {len(k)}")
    status = "interior"
    m = cell.m
    for r, mult, mu in zip(cell.roots, cell.mults, cell.mu):
        val = (-1) ** mu * _pk_value(r, k)
        size = abs(r) ** m + sum(abs(r) ** (m - j) * abs(k[j - 1]) for j in range(1, m + 1))
        eps = tol.zero * (1 + size)
        if mult > 1:
            if val <= eps:
                return "outside"
        elif val < -eps:
            return "outside"
        elif val <= eps:
            status = "boundary"
    return status


def sigma(y):
    """Elementary symmetric functions of the entries of y."""
    c = np.poly(np.asarray(y, dtype=float)) if len(y) else np.array([1.0])
    return np.array([(-1) ** j * c[j] for j in range(1, len(y) + 1)])


def lam(k, tol=DEFAULT):
    """Descending real roots of t^m - k_1 t^(m-1) + ... ; the inverse of sigma."""
    k = np.asarray(k, dtype=float)
    if len(k) == 0:
        return np.array([])
    q = RealPolynomial(np.concatenate([[1.0], [(-1) ** j * k[j - 1] for j in range(1, len(k) + 1)]]), tol)
    if q.complex_roots():
        raise DomainError("k has complex spectral roots; it is outside sigma(R^m_>=)")
    out = []
    for r, mult in q.real_roots():
        out.extend([r] * mult)
    return np.array(out)


def bands_and_sigma(cell, tol=DEFAULT):
    return sigma, (lambda k: lam(k, tol))


def locate_cell(p_D, k, tol=DEFAULT):
    """The cell of p_D containing k (interior preferred, then boundary)."""
    found = [(cell_membership(c, k, tol), c) for c in classify_cells(p_D, tol)]
    for want in ("interior", "boundary"):
        for status, c in found:
            if status == want:
                return c
    raise InvalidCellPointError("k lies in no momentum cell of p_D")


def mu_from_point(roots, lam_values, tol=DEFAULT):
    scale_ = 1 + max([abs(x) for x in lam_values] + [abs(r) for r in roots] + [0.0])
    return tuple(sum(1 for x in lam_values if x > r + tol.cluster * scale_) for r in roots)


def construct_from_cell(p_C, p_D, cell, k, tol=DEFAULT):
    m = p_D.degree - 2
    n = p_C.degree - 2
    k = np.asarray(k, dtype=float)
    if abs(p_C.coeffs[1]) > 1e-9 * (1 + np.max(np.abs(p_C.coeffs))):
        raise ParameterError("p_C must have vanishing t^(n+1) coefficient")
    try:
        hpp = p_C.divide(p_D)
    except InconsistencyError as exc:
        raise ParameterError(f"invalid (p_C, p_D) pair: {exc}") from exc
    simple = [r for r, mult in zip(cell.roots, cell.mults) if mult == 1]
    all_real = list(cell.roots)
    extra = []
    for r, mult in _snap_roots(hpp, all_real, tol):
        extra.extend([r] * mult)
    if len(extra) != n - m:
        raise ParameterError("p_C / p_D must have only real roots shared with p_D")
    if cell_membership(cell, k, tol) == "outside":
        raise InvalidCellPointError(f"k = {k.tolist()} is outside cell {cell.tag}")
    s = lam(k, tol) if m else np.array([])
    s = np.array([_snap(x, simple, tol) for x in s])
    q = np.zeros(m)
    j = 0
    while j < m:
        run = 1
        while j + run < m and s[j + run] == s[j]:
            run += 1
        if run == 1:
            others = np.delete(s, j)
            q[j] = p_D(s[j]) / np.prod(s[j] - others)
        elif run == 2:
            others = np.delete(s, [j, j + 1])
            q[j] = p_D.eval_deriv(s[j], 1) / np.prod(s[j] - others)
            q[j + 1] = 0.0
        else:
            raise InvalidCellPointError("three spectral values coincide")
        j += run
    scale_q = 1 + np.max(np.abs(p_D.coeffs)) * (1 + np.max(np.abs(s), initial=0.0)) ** (m + 2)
    if np.any(q < -tol.clamp * scale_q):
        raise InvalidCellPointError(f"negative residue {q.min():.3e}: k is outside cell {cell.tag}")
    q = np.clip(q, 0.0, None)
    quot, _ = np.polydiv(p_D.coeffs, np.poly(s) if m else np.array([1.0]))
    b2 = float(quot[2])
    diag = list(s) + extra
    tvec = list(np.sqrt(q)) + [0.0] * len(extra)
    order = sorted(range(n), key=lambda i: (-diag[i], -tvec[i]))
    point = StructurePoint(np.diag([diag[i] for i in order]).astype(complex),
                           np.array([tvec[i] for i in order], dtype=complex), b2)
    if not char_poly_pC(point).close_to(p_C, 1e-6 * (1 + np.max(np.abs(p_C.coeffs)))):
        raise InconsistencyError("constructed point does not reproduce p_C")
    return point


def _snap(x, targets, tol, radius=1e-7):
    for r in targets:
        if abs(x - r) <= radius * (1 + abs(r)):
            return r
    return float(x)


def _snap_roots(poly, targets, tol):
    out = []
    for r, mult in poly.roots:
        if not isinstance(r, float):
            return []
        out.append((_snap(r, targets, tol, radius=1e-6), mult))
    return out


def verdict(cell):
    if cell.m == 0:
        return CaseVerdict(True, "possibly_complete", "m = 0: locally symmetric, a product of complex space forms")
    bounded = cell.tag in ("3-1b", "4-0")
    if cell.tag == "3-1b":
        return CaseVerdict(True, "possibly_complete", "the only bounded cell that can carry a complete metric")
    if cell.tag == "4-0":
        return CaseVerdict(True, "orbifold_only", "compact cell; complete only as an orbifold when the roots are rationally related")
    return CaseVerdict(bounded, "never_complete", "unbounded cell")


def orbifold_case40(r, p, nu):
    """Root ladder r_b = r * sum_a (nu_a + 1)(p_a - p_b) with p_0 = 0."""
    p = [int(x) for x in p]
    if p and p[0] != 0:
        p = [0] + p
    nu = [int(x) for x in nu]
    if not r > 0:
        raise ParameterError("r must be positive")
    if len(nu) != len(p) or len(p) < 2:
        raise ParameterError("nu must have one entry per root (m + 2 in total)")
    if any(b <= a for a, b in zip(p, p[1:])):
        raise ParameterError("p must be strictly increasing")
    if reduce(gcd, p[1:]) != 1:
        raise ParameterError("p must have gcd 1")
    if any(v < 0 for v in nu):
        raise ParameterError("nu must be non-negative")
    rb = [r * sum((nu[a] + 1) * (p[a] - p[b]) for a in range(len(p))) for b in range(len(p))]
    p_D = RealPolynomial.from_roots([(x, 1) for x in rb])
    p_C = RealPolynomial.from_roots([(x, v + 1) for x, v in zip(rb, nu)])
    return p_C, p_D


def reduced_space_curvature(r, p, tol=DEFAULT):
    """c = 4 p_D'(r) / p_h'(r) at a constant eigenvalue r (a root of p_h'')."""
    p_D, hpp, _ = reduced_polys(p, tol)
    hp, _ = momentum_factors(p, tol)
    if hpp.degree == 0 or min(abs(x - r) for x, _ in hpp.real_roots()) > 1e-7 * (1 + abs(r)):
        raise ParameterError(f"{r} is not a constant eigenvalue of the point")
    denom = hp(r)
    if abs(denom) <= tol.zero * (1 + abs(r)) ** max(hp.degree, 1):
        raise SingularError("p_h'(r) vanishes")
    return 4.0 * p_D.eval_deriv(r, 1) / denom
