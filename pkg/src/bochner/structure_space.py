"""Points (H, T, V) of iu(n) + C^n + R, the U(n)-action on them and their invariants.

H is Hermitian n x n, T a complex n-vector, V a real number.  The unitary group
acts by a.(H, T, V) = (a H a*, a T, V) and the homotheties by
(H, T, V) -> (H/c, T/c^(3/2), V/c^2).
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .errors import InconsistencyError, ParameterError, UnitarityError
from .polynomial import RealPolynomial


@dataclass(frozen=True)
class StructurePoint:
    H: np.ndarray
    T: np.ndarray
    V: float

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=complex))
        T = np.atleast_1d(np.asarray(self.T, dtype=complex))
        n = H.shape[0]
        if n < 1 or H.shape != (n, n) or T.shape != (n,):
            raise ParameterError(f"shape mismatch: H {H.shape}, T {T.shape}")
        defect = np.max(np.abs(H - H.conj().T))
        if defect > DEFAULT.hermitian * (1 + np.max(np.abs(H))):
            raise ParameterError(f"H is not Hermitian (defect {defect:.3e})")
        object.__setattr__(self, "H", 0.5 * (H + H.conj().T))
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "V", float(np.real(self.V)))

    @property
    def n(self):
        return self.H.shape[0]

    def to_record(self):
        return {"n": self.n,
                "H_re": self.H.real.tolist(), "H_im": self.H.imag.tolist(),
                "T_re": self.T.real.tolist(), "T_im": self.T.imag.tolist(),
                "V": self.V}

    @classmethod
    def from_record(cls, rec):
        n = int(rec["n"])
        H = np.array(rec["H_re"], dtype=float) + 1j * np.array(rec.get("H_im", np.zeros((n, n))), dtype=float)
        T = np.array(rec["T_re"], dtype=float) + 1j * np.array(rec.get("T_im", np.zeros(n)), dtype=float)
        p = cls(H.reshape(n, n), T.reshape(n), rec["V"])
        return p

    def allclose(self, other, atol=1e-12):
        return (self.n == other.n and np.allclose(self.H, other.H, atol=atol, rtol=0)
                and np.allclose(self.T, other.T, atol=atol, rtol=0) and abs(self.V - other.V) <= atol)


@dataclass(frozen=True)
class ChamberForm:
    """The unique chamber representative of an orbit, with the unitary that moves p there."""
    point: StructurePoint
    unitary: np.ndarray


@dataclass(frozen=True)
class InvariantVector:
    a: np.ndarray   # a_k = tr H^k, k = 1..n
    b: np.ndarray   # b_2 = V, b_{k+3} = T* H^k T, k = 0..n-1

    def flat(self):
        return np.concatenate([self.a, self.b])

    def defect(self, other):
        return float(np.max(np.abs(self.flat() - other.flat())))


@dataclass(frozen=True)
class ConservedVector:
    C: np.ndarray   # C[0] is C_2, ..., C[n] is C_{n+2}

    def __getitem__(self, k):
        if k < 2 or k > len(self.C) + 1:
            raise IndexError(k)
        return self.C[k - 2]


@dataclass
class Cluster:
    """One eigenvalue of H with the data of the symmetry-dimension count."""
    value: float
    mult: int
    basis: np.ndarray          # n x mult orthonormal columns spanning the eigenspace
    T_proj: np.ndarray         # components of T in that basis
    Tsq: float
    V: float                   # V_alpha
    m: int = 0
    tau: int = 0
    rho: int = 0
    T_zero: bool = field(default=False)
    V_zero: bool = field(default=False)


# ---------------------------------------------------------------------------
# group actions

def is_unitary(a, tol=DEFAULT):
    a = np.asarray(a, dtype=complex)
    return np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0]))) <= tol.unitary * a.shape[0]


def unitary_act(p, a, tol=DEFAULT):
    a = np.asarray(a, dtype=complex)
    if a.shape != (p.n, p.n) or not is_unitary(a, tol):
        raise UnitarityError("group element is not unitary")
    return StructurePoint(a @ p.H @ a.conj().T, a @ p.T, p.V)


def scale(p, c):
    if not c > 0:
        raise ParameterError(f"scale factor must be positive, got {c}")
    return StructurePoint(p.H / c, p.T / c ** 1.5, p.V / c ** 2)


# ---------------------------------------------------------------------------
# spectral helpers

def eigen_descending(H):
    w, U = np.linalg.eigh(H)
    return w[::-1], U[:, ::-1]


def _cluster_indices(w, tol, normH):
    groups = [[0]]
    for i in range(1, len(w)):
        if abs(w[groups[-1][0]] - w[i]) <= tol.cluster * (1 + normH):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def clusters(p, tol=DEFAULT):
    """Eigen-clusters of H in descending order with V_alpha and (m, tau, rho)."""
    w, U = eigen_descending(p.H)
    normH = np.max(np.abs(w)) if len(w) else 0.0
    trH = float(np.trace(p.H).real)
    Tn2 = float(np.vdot(p.T, p.T).real)
    out = []
    for idx in _cluster_indices(w, tol, normH):
        basis = U[:, idx]
        t = basis.conj().T @ p.T
        out.append(Cluster(float(np.mean(w[idx])), len(idx), basis, t, float(np.vdot(t, t).real), 0.0))
    for c in out:
        terms = [c.value ** 2, trH * c.value, p.V]
        terms += [d.Tsq / (c.value - d.value) for d in out if d is not c]
        c.V = float(sum(terms))
        c.T_zero = c.Tsq <= tol.zero * (1 + Tn2)
        c.V_zero = abs(c.V) <= tol.zero * (1 + sum(abs(x) for x in terms))
        if not c.T_zero:
            c.m = 2 if c.mult > 1 else 1
            c.tau = 1
            c.rho = (c.mult - 1) ** 2
        elif not c.V_zero:
            c.m, c.tau, c.rho = 1, 0, c.mult ** 2
        else:
            c.m, c.tau, c.rho = 0, 2 * c.mult, c.mult ** 2
    return out


def normal_form(p, tol=DEFAULT):
    """Diagonalise H (descending) and rotate T inside each eigenspace to (|T_a|, 0, ...)."""
    cl = clusters(p, tol)
    cols, diag, tvec = [], [], []
    for c in cl:
        if c.T_zero:
            W = np.eye(c.mult, dtype=complex)
        else:
            W = _unitary_to_e1(c.T_proj)
        cols.append(c.basis @ W.conj().T)
        diag.extend([c.value] * c.mult)
        tvec.extend([np.sqrt(c.Tsq)] + [0.0] * (c.mult - 1) if not c.T_zero else [0.0] * c.mult)
    a = np.hstack(cols).conj().T
    point =StructurePoint(np.diag(np.array(diag, dtype=float)).astype(complex), np.array(tvec, dtype=complex), p.V)
    return ChamberForm(point, a)


def _unitary_to_e1(t):
    """A unitary W with W t = |t| e_1."""
    k = len(t)
    u = t / np.linalg.norm(t)
    if k == 1:
        return np.array([[np.conj(u[0])]])
    Q, _ = np.linalg.qr(np.column_stack([u, np.eye(k, dtype=complex)]))
    # the first column is u up to a phase; the other columns span its complement
    Q = Q[:, :k].copy()
    Q[:, 0] = u
    return Q.conj().T


def in_chamber(p, tol=DEFAULT):
    H = p.H
    if np.max(np.abs(H - np.diag(np.diag(H)))) > 0 or np.any(np.abs(np.diag(H).imag) > 0):
        return False
    d = np.diag(H).real
    if np.any(np.diff(d) > 0):
        return False
    if np.any(np.abs(p.T.imag) > 0) or np.any(p.T.real < 0):
        return False
    for c in clusters(p, tol):
        idx = [i for i in range(p.n) if abs(d[i] - c.value) <= tol.cluster * (1 + np.max(np.abs(d)))]
        if any(p.T[i] != 0 for i in idx[1:]):
            return False
    return True


# ---------------------------------------------------------------------------
# invariants

def invariants_phi(p):
    n = p.n
    a = np.empty(n)
    Hk = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        Hk = Hk @ p.H
        a[k - 1] = np.trace(Hk).real
    b = np.empty(n + 1)
    b[0] = p.V
    v = p.T.copy()
    for k in range(n):
        b[k + 1] = np.vdot(p.T, v).real
        v = p.H @ v
    return InvariantVector(a, b)


def newton_to_elementary(A):
    """Power sums (A_1..A_n) to elementary symmetric functions (h_1..h_n)."""
    A = np.asarray(A, dtype=float)
    n = len(A)
    h = np.zeros(n + 1)
    h[0] = 1.0
    for k in range(1, n + 1):
        s = sum((-1) ** (i - 1) * h[k - i] * A[i - 1] for i in range(1, k + 1))
        h[k] = s / k
    return h[1:]


def elementary_to_newton(h):
    h = np.concatenate([[1.0], np.asarray(h, dtype=float)])
    n = len(h) - 1
    A = np.zeros(n)
    for k in range(1, n + 1):
        s = (-1) ** (k - 1) * k * h[k]
        s += sum((-1) ** (k - 1 + i) * h[k - i] * A[i - 1] for i in range(1, k))
        A[k - 1] = s
    return A


def momentum_h(p):
    w = np.linalg.eigvalsh(p.H)
    c = np.poly(w)
    return np.array([(-1) ** j * c[j] for j in range(1, p.n + 1)])


def momentum_poly(p, tol=DEFAULT):
    w = np.sort(np.linalg.eigvalsh(p.H))[::-1]
    groups = _cluster_indices(w, tol, np.max(np.abs(w)))
    roots = [(float(np.mean(w[g])), len(g)) for g in groups]
    return RealPolynomial.from_roots(roots, tol)


def _B(p, k):
    if k == 0:
        return 1.0
    if k == 1:
        return float(np.trace(p.H).real)
    if k == 2:
        return p.V
    return float(np.vdot(p.T, np.linalg.matrix_power(p.H, k - 3) @ p.T).real)


def conserved_value(p, k, h=None):
    """C_k = sum_j (-1)^j h_j B_{k-j} for any k >= 1 (zero for k = 1 and k >= n+3)."""
    if h is None:
        h = momentum_h(p)
    hh = np.concatenate([[1.0], h])
    return sum((-1) ** j * hh[j] * _B(p, k - j) for j in range(0, min(k, p.n) + 1))


def conserved_Ck(p):
    h = momentum_h(p)
    c1 = conserved_value(p, 1, h)
    if abs(c1) > 1e-9 * (1 + np.max(np.abs(p.H))):
        raise InconsistencyError(f"C_1 = {c1:.3e} should vanish identically")
    return ConservedVector(np.array([conserved_value(p, k, h) for k in range(2, p.n + 3)]))


def cayley_hamilton_defect(p):
    """|T* p_h(H) T|, which vanishes for every point."""
    c = np.poly(np.linalg.eigvalsh(p.H))
    M = np.zeros_like(p.H)
    for coef in c:
        M = M @ p.H + coef * np.eye(p.n)
    return abs(np.vdot(p.T, M @ p.T))


def symmetry_dims(p, tol=DEFAULT):
    cl = clusters(p, tol)
    g0 = sum(c.rho for c in cl)
    orbit = sum(c.tau for c in cl)
    return g0, g0 + orbit, orbit, sum(c.m for c in cl)


def normalize_scale(values, weights):
    """Scale-normalised copy of a weighted vector (entry k has homothety weight weights[k])."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    c = max(np.abs(values) ** (1.0 / weights))
    if c == 0:
        return values.copy()
    return values / c ** weights


def phi_weights(n):
    return np.concatenate([np.arange(1, n + 1), np.arange(2, n + 3)]).astype(float)


# ---------------------------------------------------------------------------
# sampling

def random_point(rng, n, scale_=1.0):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    H = scale_ * 0.5 * (X + X.conj().T) / np.sqrt(2)
    T = scale_ * (rng.normal(size=n) + 1j * rng.normal(size=n)) / np.sqrt(2)
    return StructurePoint(H, T, scale_ ** 2 * rng.normal())


def random_unitary(rng, n):
    from scipy.stats import unitary_group
    return unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random()) * np.eye(1)
