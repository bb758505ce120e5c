"""Concrete Kähler metric fields: rotationally symmetric, g_rho, weighted
projective charts, the Hessian-type leaf chart and the dimension-one family.

A metric field returns the Hermitian matrix G(z) with G[i, j] = G_{i jbar},
so that ds^2 = G_{i jbar} dz_i dzbar_j.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import ConvergenceError, DomainError, ParameterError, SingularError
from .polynomial import RealPolynomial


@dataclass(frozen=True)
class MetricField:
    q: int
    func: Callable
    domain: Callable = lambda z: True
    name: str = "metric"
    params: dict = field(default_factory=dict)

    def __call__(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if z.shape != (self.q,):
            raise ParameterError(f"expected a point of C^{self.q}")
        if not self.domain(z):
            raise DomainError(f"{self.name}: point {z} outside the domain")
        return self.func(z)

    def sample_rows(self, points):
        rows = []
        for z in points:
            G = self(z)
            row = []
            for c in np.atleast_1d(z):
                row += [c.real, c.imag]
            for g in G.ravel():
                row += [g.real, g.imag]
            rows.append(row)
        return rows


# ---------------------------------------------------------------------------
# rotationally symmetric family:  f'' = (a t f' + k) f'^2,  x = t f'

@dataclass(frozen=True)
class RotSymParams:
    n: int
    k: float
    a: float
    branch: str = "type_one"

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("n must be positive")
        if self.branch not in ("type_one", "type_two"):
            raise ParameterError(f"unknown branch {self.branch!r}")
        if self.branch == "type_two" and not (self.a > 0 and self.k <= -2 * np.sqrt(self.a)):
            raise ParameterError("type two needs a > 0 and k <= -2 sqrt(a)")


class _Quadratic:
    """q(x) = 1 + k x + a x^2 together with an antiderivative P of 1/q."""

    def __init__(self, k, a):
        self.k, self.a = float(k), float(a)
        self.D = k * k - 4 * a
        if a != 0 and self.D >= 0:
            s = np.sqrt(self.D)
            self.roots = sorted([(-k + s) / (2 * a), (-k - s) / (2 * a)], reverse=True)
        elif a == 0 and k != 0:
            self.roots = [-1.0 / k]
        else:
            self.roots = []

    def __call__(self, x):
        k, a = self.k, self.a
        if a != 0 and self.D >= 0:
            return a * (x - self.roots[0]) * (x - self.roots[1])
        return 1 + k * x + a * x * x

    def P(self, x):
        k, a, D = self.k, self.a, self.D
        if a == 0:
            return x if k == 0 else np.log(abs(1 + k * x)) / k
        if D < 0:
            s = np.sqrt(-D)
            return 2 / s * np.arctan((2 * a * x + k) / s)
        if D == 0:
            return -1.0 / (a * (x - self.roots[0]))
        s = np.sqrt(D)
        x1, x2 = (-k + s) / (2 * a), (-k - s) / (2 * a)
        return np.log(abs((x - x1) / (x - x2))) / s

    def psi(self, x):
        # log x - 1/2 log q(x) - k/2 P(x); d/dx psi = 1 / (x q(x))
        return np.log(x) - 0.5 * np.log(self(x)) - 0.5 * self.k * self.P(x)

    def positive_root(self, lo):
        cands = [r for r in self.roots if r > lo]
        return min(cands) if cands else np.inf


class RotSymProfile:
    """x(t) solving t x' = x q(x) on the chosen branch, via log t = psi(x) - c."""

    def __init__(self, params):
        self.params = params
        self.qd = _Quadratic(params.k, params.a)
        if params.branch == "type_one":
            self.x_lo = 0.0
            self.x_hi = self.qd.positive_root(0.0)
            self.c = -0.5 * params.k * self.qd.P(0.0)
            self.t_lo = 0.0
            self.t_hi = np.inf if np.isfinite(self.x_hi) else self._t_at_infinity()
        else:
            self.x_lo = max(self.qd.roots)
            self.x_hi = np.inf
            self.c = -0.5 * np.log(params.a)
            self.t_lo, self.t_hi = 0.0, 1.0

    def _t_at_infinity(self):
        k, a, qd = self.params.k, self.params.a, self.qd
        if a == 0 and k == 0:
            return np.inf
        if a == 0:
            return 1.0 / k
        Pinf = np.pi / np.sqrt(-qd.D) if qd.D < 0 else 0.0
        return float(np.exp(-0.5 * np.log(a) - 0.5 * k * Pinf - self.c))

    def domain(self):
        return self.t_lo, self.t_hi

    def in_domain(self, t):
        if self.params.branch == "type_one":
            return 0.0 <= t < self.t_hi
        return 0.0 < t < 1.0

    def x(self, t):
        if not self.in_domain(t):
            raise DomainError(f"t = {t} outside the profile domain [{self.t_lo}, {self.t_hi})")
        if self.params.branch == "type_one" and t == 0:
            return 0.0
        if self.params.k == 0 and self.params.a == 0:
            return float(t)
        target = np.log(t)
        g = lambda x: self.qd.psi(x) - self.c - target
        lo, hi = self._bracket(g, t)
        return optimize.brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)

    def _bracket(self, g, t):
        a, b = self.x_lo, self.x_hi
        if np.isfinite(b):
            lo = a + (b - a) * 0.5 if a > 0 else min(t, b * 0.5)
            hi = b - (b - a) * 0.5
            while g(lo) > 0:
                lo = a + (lo - a) * 0.5 if a > 0 else lo * 0.5
            while g(hi) < 0:
                hi = b - (b - hi) * 0.5
                if b - hi <= 1e-15 * max(1.0, abs(b)):
                    raise DomainError("t too close to the end of the profile range")
        else:
            lo = a + 1.0 if a > 0 else t
            hi = lo
            while g(lo) > 0:
                lo = a + (lo - a) * 0.5 if a > 0 else lo * 0.5
            while g(hi) < 0:
                hi = hi * 2 + 1
                if hi > 1e300:
                    raise DomainError("t beyond the profile range")
        return lo, hi

    def f_prime(self, t):
        if t == 0 and self.params.branch == "type_one":
            return 1.0
        return self.x(t) / t

    def f_second(self, t, fp=None):
        fp = self.f_prime(t) if fp is None else fp
        return (self.params.a * t * fp + self.params.k) * fp * fp


def rotsym_profile(params, t):
    prof = RotSymProfile(params)
    return prof.x(t), prof.f_prime(t)


def rotsym_domain(params):
    return RotSymProfile(params).domain()


def rotsym_metric(params):
    prof = RotSymProfile(params)

    def G(z):
        t = float(np.vdot(z, z).real)
        fp = prof.f_prime(t)
        fpp = prof.f_second(t, fp)
        return fp * np.eye(len(z)) + fpp * np.outer(z.conj(), z)

    dom = lambda z: prof.in_domain(float(np.vdot(z, z).real))
    return MetricField(params.n, G, dom, f"rotsym(n={params.n}, k={params.k}, a={params.a}, {params.branch})",
                       {"n": params.n, "k": params.k, "a": params.a, "branch": params.branch})


def rotsym_ricci_eigs(params, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    prof = RotSymProfile(params)
    x = prof.x(float(np.vdot(z, z).real))
    n, k, a = params.n, params.k, params.a
    return -2 * (n + 1) * k - 2 * (n + 2) * a * x, -2 * (n + 1) * k - 4 * (n + 2) * a * x


def rotsym_momentum_poly(params, z):
    """(t - k/(n+2))^(n-1) (t - k/(n+2) - a x) as a polynomial."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x = RotSymProfile(params).x(float(np.vdot(z, z).real))
    c = params.k / (params.n + 2)
    return RealPolynomial.from_roots([(c, params.n - 1), (c + params.a * x, 1)]
                                     if params.n > 1 else [(c + params.a * x, 1)])


def rotsym_arclength(params, t0, t1, cap=60.0):
    """Radial arc length between |z|^2 = t0 and t1 (t1 may be inf or the end of the range).

    Near a finite end x_max of the x-range the distance to x_max is written
    e^{-w} and w is integrated up to cap; toward x = inf, x = e^w is used.
    """
    prof = RotSymProfile(params)
    qd = prof.qd
    if t1 < t0:
        t0, t1 = t1, t0
    x0 = prof.x(t0)
    to_end = (t1 >= prof.t_hi) or np.isinf(t1)
    if not to_end:
        x1 = prof.x(t1)
        if x1 == x0:
            return 0.0
        return integrate.quad(lambda x: 1 / (2 * np.sqrt(x * qd(x))), x0, x1, limit=400)[0]
    xm = prof.x_hi
    if np.isfinite(xm):
        mid = 0.5 * (x0 + xm)
        first = integrate.quad(lambda x: 1 / (2 * np.sqrt(x * qd(x))), x0, mid, limit=400)[0] if mid > x0 else 0.0
        w0 = -np.log(xm - mid)
        other = [r for r in qd.roots if r != xm]
        mult = 2 if (qd.a != 0 and qd.D == 0) else 1
        lead = abs(qd.a) if qd.a != 0 else abs(qd.k)

        def f(w):
            # d = e^{-w}; integrand (dx/dw) / (2 sqrt(x q)) with q factored around x_max
            x = xm - np.exp(-w)
            logq = np.log(lead) + mult * (-w)
            if mult == 1:
                logq += sum(np.log(abs(x - r)) for r in other)
            return np.exp(-w - 0.5 * logq) / (2 * np.sqrt(x))
        return first + integrate.quad(f, w0, cap, limit=2000)[0]
    w0 = np.log(max(x0, 1e-300)) if x0 > 0 else None
    first = 0.0
    if w0 is None or w0 < 0:
        first = integrate.quad(lambda x: 1 / (2 * np.sqrt(x * qd(x))), x0, 1.0, limit=400)[0]
        w0 = 0.0
    g = lambda w: np.exp(w) / (2 * np.sqrt(np.exp(w) * qd(np.exp(w))))
    return first + integrate.quad(g, w0, cap, limit=2000)[0]


# ---------------------------------------------------------------------------
# g_rho family on C^n

def grho_s(z, rho):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ParameterError("rho must be non-negative")
    w = np.abs(z) ** 2
    tot = float(w.sum())
    if tot == 0:
        return 0.0
    g = lambda s: s - float(np.sum(np.exp(-rho * s) * w))
    s = optimize.brentq(g, 0.0, tot, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    for _ in range(3):
        d = 1 + float(np.sum(rho * np.exp(-rho * s) * w))
        s -= g(s) / d
    return s


def grho_inverse(z, rho):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rho = np.asarray(rho, dtype=float)
    s = grho_s(z, rho)
    S = 1 + float(np.sum(rho * np.exp(-rho * s) * np.abs(z) ** 2))
    M = np.diag(np.exp(rho * s)).astype(complex)
    M += (rho[:, None] + rho[None, :] + np.outer(rho, rho) * s) * np.outer(z.conj(), z)
    return S * M


def grho_metric(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ParameterError("rho must be non-negative")

    def G(z):
        if np.all(rho == 0):
            return np.eye(len(z), dtype=complex)
        Ginv = grho_inverse(z, rho)
        try:
            return np.linalg.inv(Ginv)
        except np.linalg.LinAlgError as exc:
            raise SingularError("g_rho inverse matrix is singular") from exc

    return MetricField(len(rho), G, name=f"g_rho(rho={rho.tolist()})", params={"rho": rho.tolist()})


# ---------------------------------------------------------------------------
# weighted projective charts

def wps_s(z, rho):
    """s in (0, 1] with s + sum |z_a|^2 s^(rho_a / rho_1) = 1."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rho = np.asarray(rho, dtype=float)
    e = rho[1:] / rho[0]
    w = np.abs(z) ** 2
    g = lambda s: s + float(np.sum(w * s ** e)) - 1.0
    if g(1.0) == 0:
        return 1.0
    s = optimize.brentq(g, 0.0, 1.0, xtol=1e-300, rtol=4 * np.finfo(float).eps)
    for _ in range(3):
        d = 1 + float(np.sum(w * e * s ** (e - 1)))
        s -= g(s) / d
    return s


def wps_weights(z, rho):
    """(s, w_a, w_1, w_0) of the weighted projective chart."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rho = np.asarray(rho, dtype=float)
    r1, ra = rho[0], rho[1:]
    s = wps_s(z, rho)
    sp = s ** (ra / r1)
    w2 = np.abs(z) ** 2
    D = r1 + float(np.sum((ra - r1) * w2 * sp))
    wa = w2 * sp / D
    w1 = (1 - float(np.sum(ra * wa))) / r1
    w0 = -(1 - float(np.sum((ra - r1) * wa))) / r1
    return s, wa, w1, w0, D, sp


def wps_metric(rho):
    rho = np.asarray(rho, dtype=float)
    if len(rho) < 2 or np.any(rho <= 0):
        raise ParameterError("wps needs at least two positive weights")
    r1, ra = rho[0], rho[1:]

    def G(z):
        s, wa, w1, w0, D, sp = wps_weights(z, rho)
        zz = np.outer(z.conj(), z)
        Ginv = zz * (np.outer(ra - r1, ra - r1) / (r1 * r1 * w0) + np.outer(ra, ra) / (r1 * r1 * w1))
        # diagonal z zbar / w_a written as D / s^(rho_a/rho_1) so that z_a = 0 is regular
        Ginv = Ginv + np.diag(D / sp)
        return np.linalg.inv(Ginv)

    return MetricField(len(ra), G, name=f"wps(rho={rho.tolist()})", params={"rho": rho.tolist()})


def fubini_study(z):
    """Affine-chart Fubini-Study coefficients d d-bar log(1 + |z|^2)."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    N = 1 + float(np.vdot(z, z).real)
    return np.eye(len(z)) / N - np.outer(z.conj(), z) / N ** 2


def reduction_metric(weights, c=1.0):
    """Kähler reduction of flat C^N by the circle with weights w, chart zeta = (1, y).

    Used as a negative control: it is Bochner-flat only for equal weights.
    """
    w = np.asarray(weights, dtype=float)
    if len(w) < 2 or np.any(w <= 0) or w[0] != 1:
        raise ParameterError("weights must be positive with w_0 = 1")
    wy = w[1:]

    def solve_X(y):
        # level set X + sum w_i |y_i|^2 X^{w_i} = c of the moment map
        a = np.abs(y) ** 2
        g = lambda X: X + float(np.sum(wy * a * X ** wy)) - c
        return optimize.brentq(g, 0.0, c, xtol=1e-300, rtol=4 * np.finfo(float).eps)

    def G(y):
        X = solve_X(y)
        denom = 1 + float(np.sum(wy * wy * np.abs(y) ** 2 * X ** (wy - 1)))
        v = wy * X ** wy
        return np.diag(X ** wy).astype(complex) - np.outer(v * y.conj(), v * y) / (X * denom)

    return MetricField(len(wy), G, name=f"reduction(w={w.tolist()})", params={"weights": w.tolist()})


# ---------------------------------------------------------------------------
# Hessian-type leaf chart

class LeafChart:
    """z = grad G(u) + i theta with metric (R_D)^{-1} in the complex chart.

    Works for cells whose p_D has only simple roots (complex pairs allowed), where
    R_D = sum dl^2 / (4 l) and G = 1/4 sum l (log l - 1) on a local branch.
    """

    def __init__(self, cell, u0):
        from .cell_metric import R_D_sym
        self.cell = cell
        self.p_D = cell.p_D
        if any(k != 1 for _, k in self.p_D.roots):
            raise ParameterError("leaf chart needs p_D with simple roots")
        m = self.p_D.degree - 2
        self.m = m
        dp = self.p_D.deriv(1)
        self.faces = []
        for r, _ in self.p_D.roots:
            r = complex(r)
            c = np.array([r ** m] + [(-1) ** j * r ** (m - j) for j in range(1, m + 1)])
            self.faces.append(-c / np.polyval(dp, r))
        self.u0 = np.asarray(u0, dtype=float)
        R_D_sym(self.p_D, self.u0, cell)   # raises unless u0 is interior
        self._last = self.u0.copy()

    def _ls(self, u):
        return [f[0] + f[1:] @ u for f in self.faces]

    def grad_G(self, u):
        u = np.asarray(u, dtype=float)
        return np.real(0.25 * sum(f[1:] * np.log(l) for f, l in zip(self.faces, self._ls(u))))

    def hess_G(self, u):
        u = np.asarray(u, dtype=float)
        return np.real(sum(np.outer(f[1:], f[1:]) / (4 * l) for f, l in zip(self.faces, self._ls(u))))

    def inside(self, u):
        from .classification import cell_membership
        return cell_membership(self.cell, u) == "interior"

    def legendre_inverse(self, x, u_start=None, maxiter=100):
        x = np.asarray(x, dtype=float)
        u = (self._last if u_start is None else np.asarray(u_start, dtype=float)).copy()
        for _ in range(maxiter):
            r = self.grad_G(u) - x
            if np.max(np.abs(r)) <= 1e-13 * (1 + np.max(np.abs(x))):
                self._last = u.copy()
                return u
            step = np.linalg.solve(self.hess_G(u), r)
            lam = 1.0
            while True:
                cand = u - lam * step
                if self.inside(cand) and np.linalg.norm(self.grad_G(cand) - x) < np.linalg.norm(r) * (1 - 1e-4 * lam):
                    break
                lam *= 0.5
                if lam < 1e-12:
                    raise ConvergenceError("Legendre inversion left the cell (x outside the gradient image)")
            u = cand
        raise ConvergenceError("Legendre inversion did not converge")

    def u_of(self, z):
        return self.legendre_inverse(np.real(np.atleast_1d(z)))

    def metric(self):
        def G(z):
            u = self.u_of(z)
            return np.linalg.inv(self.hess_G(u)).astype(complex)
        return MetricField(self.m, G, name="leaf", params={"p_D": self.p_D.coeffs.tolist()})

    def real_metric(self, u):
        """Block metric diag(R_D, R_D^{-1}) in (u, theta) coordinates."""
        R = self.hess_G(u)
        m = self.m
        out = np.zeros((2 * m, 2 * m))
        out[:m, :m] = R
        out[m:, m:] = np.linalg.inv(R)
        return out


def leaf_metric(cell, u):
    chart = LeafChart(cell, u)
    return chart.real_metric(u), chart


# ---------------------------------------------------------------------------
# dimension one:  g = dH^2 / (4 p(H)) + 4 p(H) d theta^2 with p = t^3 + C2 t + C3

@dataclass
class Dim1Family:
    C2: float
    C3: float
    p: RealPolynomial
    case: str
    roots: list
    components: list                 # H-intervals where p > 0, with a short label
    periods: dict                    # root -> tau at simple roots adjacent to a component

    def metric(self, H):
        pv = self.p(H)
        if pv <= 0:
            raise DomainError(f"p({H}) <= 0")
        return 1.0 / (4 * pv), 4 * pv

    def gaussian_curvature(self, H, h=1e-3):
        """Brioschi formula for E dH^2 + G dtheta^2 with E, G depending on H only,
        using finite differences of the metric coefficients."""
        E = lambda s: self.metric(s)[0]
        G = lambda s: self.metric(s)[1]
        W = lambda s: np.sqrt(E(s) * G(s))
        dG = lambda s: (-G(s + 2 * h) + 8 * G(s + h) - 8 * G(s - h) + G(s - 2 * h)) / (12 * h)
        inner = lambda s: dG(s) / W(s)
        d_inner = (-inner(H + 2 * h) + 8 * inner(H + h) - 8 * inner(H - h) + inner(H - 2 * h)) / (12 * h)
        return -d_inner / (2 * W(H))

    def cone_period(self, r, span=1e-4, samples=40):
        """Period that closes the theta-circles smoothly at the root r, fitted from the metric.

        With H = r +- v^2 and p = (H - r) q the distance from the root is the smooth
        integral of dv / sqrt|q|;
        circumference per unit period against distance is fitted by a d + b d^3.
        """
        pv = self.p
        sign = 1 if pv(r + span) > 0 else -1
        vs = np.sqrt(span) * np.linspace(0.05, 1.0, samples)
        quot = np.polydiv(pv.coeffs, [1.0, -r])[0]     # p(H) = (H - r) quot(H)
        speed = lambda v: 1 / np.sqrt(abs(np.polyval(quot, r + sign * v * v)))
        dist = np.array([integrate.quad(speed, 0.0, v, epsabs=0, epsrel=1e-13)[0] for v in vs])
        circ_per_period = 2 * np.sqrt(np.abs([pv(r + sign * v * v) for v in vs]))
        A = np.column_stack([dist, dist ** 3])
        slope = np.linalg.lstsq(A, circ_per_period, rcond=None)[0][0]
        return 2 * np.pi / slope


def dim1_suite(C2, C3):
    p = RealPolynomial([1.0, 0.0, float(C2), float(C3)])
    real = p.real_roots()
    roots = [r for r, _ in real]
    mults = [k for _, k in real]
    if len(real) == 1 and mults[0] == 1:
        case = "1"
    elif len(real) == 1:
        case = "2"
    elif len(real) == 2:
        case = "3-1" if mults[0] == 2 else "3-2"
    else:
        case = "4"
    comps = []
    edges = [np.inf] + roots + [-np.inf]
    for hi, lo in zip(edges, edges[1:]):
        probe = (hi + lo) / 2 if np.isfinite(hi) and np.isfinite(lo) else (lo + 1 if np.isfinite(lo) else hi - 1)
        if p(probe) > 0:
            label = "bounded" if np.isfinite(hi) and np.isfinite(lo) else "unbounded"
            comps.append((lo, hi, label))
    periods = {}
    d1 = p.deriv(1)
    for r, k in real:
        if k == 1:
            periods[r] = np.pi / abs(np.polyval(d1, r))
    return Dim1Family(float(C2), float(C3), p, case, roots, comps, periods)


def dim1_from_roots(r1, r2):
    """Three-real-root family with r0 = -(r1 + r2) > r1 > r2."""
    r0 = -(r1 + r2)
    C2 = r0 * r1 + r0 * r2 + r1 * r2
    C3 = -r0 * r1 * r2
    return dim1_suite(C2, C3)


def dim1_band_periods(r1, r2):
    """(tau_1, tau_2) at the ends of the bounded strip r2 < H < r1."""
    C2 = -(r1 * r1 + r1 * r2 + r2 * r2)
    return -np.pi / (3 * r1 * r1 + C2), np.pi / (3 * r2 * r2 + C2)


def dim1_equal_period_scan(lo=-5.0, hi=5.0, step=0.01):
    """Grid scan of tau_1 - tau_2 over admissible root pairs; returns (count, min relative gap, any zero)."""
    g = np.arange(lo, hi + step / 2, step)
    R1, R2 = np.meshgrid(g, g, indexing="ij")
    ok = (R1 > R2) & (-(R1 + R2) > R1)
    r1, r2 = R1[ok], R2[ok]
    C2 = -(r1 * r1 + r1 * r2 + r2 * r2)
    t1 = -np.pi / (3 * r1 * r1 + C2)
    t2 = np.pi / (3 * r2 * r2 + C2)
    gap = (t1 - t2) / (t1 + t2)
    return int(ok.sum()), float(np.min(np.abs(gap))), bool(np.any(gap <= 0))


def dim1_orbifold_roots(r, p, q):
    """Roots (r_1, r_2) = (r(q - 2p), r(p - 2q)), 0 < p < q; then tau_1 : tau_2 = q : p."""
    return r * (q - 2 * p), r * (p - 2 * q)
