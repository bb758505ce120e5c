"""The structure-function ODE along a geodesic with constant frame direction w.

    H' = T w* + w T*
    T' = (H^2 + (tr H) H + V I) w
    V' = (tr H)(T* w + w* T) + (T* H w + w* H T)

Fixed-step RK4, so that drift statistics are reproducible; H is re-symmetrised
after every step and the defect seen before that is kept on the path.
"""

from dataclasses import dataclass, field

import numpy as np

from .classification import momentum_factors
from .config import DEFAULT
from .errors import ParameterError, PreconditionError
from .structure_space import StructurePoint, clusters, conserved_Ck, momentum_h


@dataclass
class StructurePath:
    s: np.ndarray
    points: list
    w: np.ndarray
    h: float
    max_sym_defect: float = 0.0
    blew_up: bool = False
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    @property
    def end(self):
        return self.points[-1]

    def rows(self):
        """CSV rows: s, eigenvalues of H (descending), |T|^2, V, C_2..C_{n+2}."""
        out = []
        for s, p in zip(self.s, self.points):
            eig = np.sort(np.linalg.eigvalsh(p.H))[::-1]
            out.append([float(s), *map(float, eig), float(np.vdot(p.T, p.T).real), p.V,
                        *map(float, conserved_Ck(p).C)])
        return out

    def header(self):
        n = self.points[0].n
        return (["s"] + [f"H_eig{i + 1}" for i in range(n)] + ["T_norm2", "V"]
                + [f"C{k}" for k in range(2, n + 3)])


def rhs(H, T, V, w):
    trH = np.trace(H).real
    dH = np.outer(T, w.conj()) + np.outer(w, T.conj())
    dT = (H @ H + trH * H + V * np.eye(len(T))) @ w
    dV = 2 * trH * np.real(np.vdot(T, w)) + 2 * np.real(np.vdot(T, H @ w))
    return dH, dT, dV


def _rk4(H, T, V, w, h):
    k1 = rhs(H, T, V, w)
    k2 = rhs(H + h / 2 * k1[0], T + h / 2 * k1[1], V + h / 2 * k1[2], w)
    k3 = rhs(H + h / 2 * k2[0], T + h / 2 * k2[1], V + h / 2 * k2[2], w)
    k4 = rhs(H + h * k3[0], T + h * k3[1], V + h * k3[2], w)
    return (H + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            T + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
            V + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]))


def integrate(p0, w, length, h=1e-3, ceiling=1e8, every=1):
    """Integrate from p0 along the unit direction w for the given arc length."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    if w.shape != (p0.n,) or abs(np.linalg.norm(w) - 1) > 1e-12:
        raise ParameterError("w must be a unit vector of the right size")
    if not h > 0 or length < 0:
        raise ParameterError("need h > 0 and length >= 0")
    nsteps = int(np.ceil(length / h - 1e-9)) if length > 0 else 0
    hh = length / nsteps if nsteps else h
    H, T, V = p0.H.copy(), p0.T.copy(), p0.V
    s_list, pts = [0.0], [p0]
    path = StructurePath(None, None, w, hh)
    for i in range(1, nsteps + 1):
        H, T, V = _rk4(H, T, V, w, hh)
        defect = float(np.max(np.abs(H - H.conj().T)))
        path.max_sym_defect = max(path.max_sym_defect, defect)
        H = 0.5 * (H + H.conj().T)
        V = float(np.real(V))
        if not np.isfinite(V) or np.max(np.abs(H)) > ceiling:
            path.blew_up = True
            path.notes.append(f"|H| exceeded {ceiling:g} at s = {i * hh:.6g}")
            break
        if i % every == 0 or i == nsteps:
            s_list.append(i * hh)
            pts.append(StructurePoint(H, T, V))
    path.s = np.array(s_list)
    path.points = pts
    return path


def conserved_drift(path):
    """max_s |C_k(s) - C_k(0)| for k = 2..n+2."""
    c0 = conserved_Ck(path.points[0]).C
    drift = np.zeros_like(c0)
    for p in path.points[1:]:
        drift = np.maximum(drift, np.abs(conserved_Ck(p).C - c0))
    return drift


# ---------------------------------------------------------------------------
# constant roots of the momentum polynomial

def check_direction(p, w, tol=DEFAULT, atol=1e-10):
    """Raise PreconditionError unless w meets the orthogonality conditions under
    which the constant roots of p_h are followed along the path: T_a* w real in
    every eigenspace L_a of H, and w orthogonal to L_a wherever T and V vanish.
    """
    w = np.asarray(w, dtype=complex)
    cl = clusters(p, tol)
    if all(c.m == 0 for c in cl):
        return   # the right-hand side vanishes for every w
    for c in cl:
        wa = c.basis.conj().T @ w
        if not c.T_zero:
            im = np.vdot(c.T_proj, wa).imag
            if abs(im) > atol * (1 + np.linalg.norm(c.T_proj)):
                raise PreconditionError(f"T* w has imaginary part {im:.2e} in the {c.value:.6g}-eigenspace")
        elif c.V_zero and np.linalg.norm(wa) > atol:
            raise PreconditionError(f"w must be orthogonal to the {c.value:.6g}-eigenspace where T and V vanish")


def admissible_direction(p, rng=None, coeffs=None, tol=DEFAULT):
    """A unit w satisfying ``check_direction``.

    In each eigenspace with T != 0: coeffs[i] times the unit vector along T plus a
    random part orthogonal to T; where only V survives a random vector; zero elsewhere.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    w = np.zeros(p.n, dtype=complex)
    cl = clusters(p, tol)
    for i, c in enumerate(cl):
        a = rng.normal() if coeffs is None else coeffs[i]
        v = rng.normal(size=c.mult) + 1j * rng.normal(size=c.mult)
        if not c.T_zero:
            u = c.T_proj / np.linalg.norm(c.T_proj)
            w += c.basis @ (a * u + (v - u * np.vdot(u, v)))
        elif not c.V_zero:
            w += a * c.basis @ (v / np.linalg.norm(v))
    nrm = np.linalg.norm(w)
    if nrm == 0:
        # every eigenspace has T = V = 0: the right-hand side vanishes for the only admissible w = 0,
        # so any unit vector gives the same (constant) path
        w = np.zeros(p.n, dtype=complex)
        w[0] = 1.0
        return w
    return w / nrm


@dataclass
class ConstantFactorReport:
    p_hpp: np.ndarray
    coeff_residual: float
    eig_deviation: float
    vacuous: bool

    def passed(self, tol=1e-6):
        return self.vacuous or self.coeff_residual < tol


def constant_factor_check(path, tol=DEFAULT, check=True):
    """Does the factor p_hpp of p_h found at the start divide p_h along the path?"""
    p0 = path.points[0]
    _, p_hpp = momentum_factors(p0, tol)
    target = p_hpp.coeffs
    vacuous = len(target) == 1
    if check and not vacuous:
        check_direction(p0, path.w, tol)
    res = 0.0
    dev = 0.0
    consts = [(c.value, c.mult - c.m) for c in clusters(p0, tol) if c.mult > c.m]
    for p in path.points:
        ph = np.concatenate([[1.0], [(-1) ** j * x for j, x in enumerate(momentum_h(p), 1)]])
        if not vacuous:
            _, r = np.polydiv(ph, target)
            res = max(res, float(np.max(np.abs(r))) / (1 + float(np.max(np.abs(ph)))))
        eig = np.linalg.eigvalsh(p.H)
        for val, k in consts:
            d = np.sort(np.abs(eig - val))[:k]
            dev = max(dev, float(d.max()))
    return ConstantFactorReport(target, res, dev, vacuous)
