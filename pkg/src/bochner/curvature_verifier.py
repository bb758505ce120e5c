"""Finite-difference curvature of a Kähler metric field and the Bochner test.

Conventions (G[i, j] = G_{i jbar}, ds^2 = G_{i jbar} dz_i dzbar_j):

    R_{i jbar k lbar} = -d_k dbar_l G_{i jbar} + G^{p qbar} d_k G_{i qbar} dbar_l G_{p jbar}
    Ric_{k lbar}      = G^{i jbar} R_{i jbar k lbar}  (= -d dbar log det G)

The Ricci eigenvalues with respect to the Kähler form, the scalar curvature
and the Bochner form are expressed through three constants kept in
``CALIBRATION``; ``calibrate()`` re-derives them from the flat metric and the
constant-curvature members of the rotationally symmetric family.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DomainError, ParameterError
from .polynomial import RealPolynomial


@dataclass(frozen=True)
class Calibration:
    rho_factor: float     # Ricci eigenvalues w.r.t. the Kähler form = rho_factor * eig(G^-1 Ric)
    s_factor: float       # S endomorphism = s_factor * G^-1 P
    form_factor: float    # R = form_factor * Form(P) on Bochner-flat metrics


CALIBRATION = Calibration(rho_factor=2.0, s_factor=-1.0, form_factor=1.0)


@dataclass
class CurvatureReport:
    z: np.ndarray
    G: np.ndarray
    R: np.ndarray
    ricci: np.ndarray
    scalar: float
    ricci_eigs: np.ndarray
    S_fit: np.ndarray
    bochner_residual: float
    H_fit: np.ndarray
    p_h_extracted: RealPolynomial
    symmetry_defect: float
    kahler_defect: float

    def to_record(self):
        c = lambda M: {"re": np.real(M).tolist(), "im": np.imag(M).tolist()}
        return {"z": c(self.z), "G": c(self.G), "ricci": c(self.ricci), "scalar": self.scalar,
                "ricci_eigs": np.real(self.ricci_eigs).tolist(), "S_fit": c(self.S_fit),
                "bochner_residual": self.bochner_residual, "H_fit": c(self.H_fit),
                "p_h": self.p_h_extracted.to_record(), "symmetry_defect": self.symmetry_defect,
                "kahler_defect": self.kahler_defect, "R": c(self.R)}


# ---------------------------------------------------------------------------
# derivatives

def _first(f, x, e, h):
    return (-f(x + 2 * h * e) + 8 * f(x + h * e) - 8 * f(x - h * e) + f(x - 2 * h * e)) / (12 * h)


def _second(f, x, e, h, f0):
    return (-f(x + 2 * h * e) + 16 * f(x + h * e) - 30 * f0 + 16 * f(x - h * e) - f(x - 2 * h * e)) / (12 * h * h)


def _real_derivatives(F, x, h):
    """First and second partials of F in the real coordinates x, fourth order."""
    N = len(x)
    I = np.eye(N)
    f0 = F(x)
    d1 = [_first(F, x, I[a], h) for a in range(N)]
    d2 = [[None] * N for _ in range(N)]
    for a in range(N):
        d2[a][a] = _second(F, x, I[a], h, f0)
    for a in range(N):
        for b in range(a + 1, N):
            # polarisation: D_ab = (D_{e_a+e_b} - D_{e_a-e_b}) / 4
            dp = _second(F, x, I[a] + I[b], h, f0)
            dm = _second(F, x, I[a] - I[b], h, f0)
            d2[a][b] = d2[b][a] = (dp - dm) / 4
    return f0, np.array(d1), np.array(d2)


def metric_derivatives(field, z, step=None):
    """(G, dG[k] = d_k G, dbG[l] = dbar_l G, ddG[k, l] = d_k dbar_l G) by Richardson-extrapolated FD."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    q = len(z)
    h = 1e-3 * (1 + np.linalg.norm(z)) if step is None else float(step)
    x0 = np.concatenate([z.real, z.imag])

    def F(x):
        return field(x[:q] + 1j * x[q:])

    try:
        G, a1, a2 = _real_derivatives(F, x0, h)
        _, b1, b2 = _real_derivatives(F, x0, h / 2)
    except DomainError as exc:
        raise DomainError(f"finite-difference step {h:.3g} too large for the domain margin at z") from exc
    d1 = (16 * b1 - a1) / 15
    d2 = (16 * b2 - a2) / 15
    dx, dy = d1[:q], d1[q:]
    dG = 0.5 * (dx - 1j * dy)
    dbG = 0.5 * (dx + 1j * dy)
    xx, yy = d2[:q, :q], d2[q:, q:]
    xy, yx = d2[:q, q:], d2[q:, :q]
    ddG = 0.25 * (xx + yy + 1j * (xy - yx))
    return G, dG, dbG, ddG


def curvature_from_derivatives(G, dG, dbG, ddG):
    Ginv = np.linalg.inv(G)
    R = -np.transpose(ddG, (2, 3, 0, 1))
    R = R + np.einsum("qp,kiq,lpj->ijkl", Ginv, dG, dbG)
    return R


def kahler_curvature(field, z, step=None):
    G, dG, dbG, ddG = metric_derivatives(field, z, step)
    return curvature_from_derivatives(G, dG, dbG, ddG), G


def symmetry_defect(R):
    norm = 1 + np.linalg.norm(R)
    d1 = np.linalg.norm(R - np.transpose(R, (2, 1, 0, 3)))
    d2 = np.linalg.norm(R - np.transpose(R, (0, 3, 2, 1)))
    d3 = np.linalg.norm(np.conj(R) - np.transpose(R, (1, 0, 3, 2)))
    return float(max(d1, d2, d3) / norm)


def kahler_defect(dG, G):
    """|d_k G_{i jbar} - d_i G_{k jbar}| relative to |G|; zero for a closed Kähler form."""
    return float(np.linalg.norm(dG - np.transpose(dG, (1, 0, 2))) / (1 + np.linalg.norm(G)))


# ---------------------------------------------------------------------------
# Ricci, scalar, Bochner form

def ricci_scalar(R, G, cal=CALIBRATION):
    Ginv = np.linalg.inv(G)
    ric = np.einsum("ji,ijkl->kl", Ginv, R)
    ric = 0.5 * (ric + ric.conj().T)
    scalar = cal.rho_factor * float(np.real(np.trace(Ginv @ ric)))
    return ric, scalar


def ricci_eigenvalues(ric, G, cal=CALIBRATION):
    return cal.rho_factor * linalg.eigh(ric, G, eigvals_only=True)


def bochner_form(P, G):
    return (np.einsum("ij,kl->ijkl", G, P) + np.einsum("kl,ij->ijkl", G, P)
            + np.einsum("il,kj->ijkl", G, P) + np.einsum("kj,il->ijkl", G, P))


def bochner_fit(ric, G):
    """P with Ric = (n+2) P + tr_G(P) G."""
    n = G.shape[0]
    sc = float(np.real(np.trace(np.linalg.solve(G, ric))))
    return (ric - sc * G / (2 * (n + 1))) / (n + 2)


def bochner_residual(R, G, cal=CALIBRATION):
    ric, _ = ricci_scalar(R, G, cal)
    P = bochner_fit(ric, G)
    form = cal.form_factor * bochner_form(P, G)
    res = float(np.linalg.norm(R - form) / (1 + np.linalg.norm(R)))
    S_fit = cal.s_factor * P
    return S_fit, res


def momentum_endomorphism(ric, G, cal=CALIBRATION):
    """H from the renormalised Ricci form: tr(rho)/(2(n+1)(n+2)) I - rho/(2(n+2))."""
    n = G.shape[0]
    rho = cal.rho_factor * np.linalg.solve(G, ric)
    return np.real_if_close(np.trace(rho)) / (2 * (n + 1) * (n + 2)) * np.eye(n) - rho / (2 * (n + 2))


def momentum_from_S(S_fit, G):
    n = G.shape[0]
    S = np.linalg.solve(G, S_fit)
    return S - np.trace(S) / (n + 2) * np.eye(n)


def _poly_from_endomorphism(Hhat, ric, G, cal):
    n = G.shape[0]
    lam = ricci_eigenvalues(ric, G, cal)
    eig = np.sum(lam) / (2 * (n + 1) * (n + 2)) - lam / (2 * (n + 2))
    return RealPolynomial(np.poly(np.sort(eig)[::-1]))


def extract_momentum(field, z, step=None, cal=CALIBRATION):
    R, G = kahler_curvature(field, z, step)
    ric, _ = ricci_scalar(R, G, cal)
    Hhat = momentum_endomorphism(ric, G, cal)
    p_h = _poly_from_endomorphism(Hhat, ric, G, cal)
    h = np.array([(-1) ** j * p_h.coeffs[j] for j in range(1, p_h.degree + 1)])
    return Hhat, p_h, h


def holo_sect_curvature(R, G, v):
    v = np.asarray(v, dtype=complex)
    if np.allclose(v, 0):
        raise ParameterError("v must be nonzero")
    num = np.einsum("ijkl,i,j,k,l->", R, v, v.conj(), v, v.conj())
    den = np.real(v @ G @ v.conj()) ** 2
    return float(np.real(num) / den)


def curvature_report(field, z, step=None, cal=CALIBRATION):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    G, dG, dbG, ddG = metric_derivatives(field, z, step)
    R = curvature_from_derivatives(G, dG, dbG, ddG)
    ric, scalar = ricci_scalar(R, G, cal)
    S_fit, res = bochner_residual(R, G, cal)
    Hhat = momentum_endomorphism(ric, G, cal)
    p_h = _poly_from_endomorphism(Hhat, ric, G, cal)
    return CurvatureReport(z, G, R, ric, scalar, ricci_eigenvalues(ric, G, cal), S_fit, res, Hhat, p_h,
                           symmetry_defect(R), kahler_defect(dG, G))


# ---------------------------------------------------------------------------
# calibration

def calibrate(n=2, k=8.0, step=None):
    """Re-derive the convention constants from model metrics.

    rho_factor: the constant-curvature rotationally symmetric metric has Ricci
    eigenvalue -2(n+1)k with respect to the Kähler form.
    form_factor: on that space form R is a multiple of the Bochner form.
    s_factor: the momentum polynomial of that space form is (t - k/(n+2))^n, which
    fixes the sign relating S to the trace-adjusted Ricci tensor.
    """
    from .explicit_metrics import MetricField, RotSymParams, rotsym_metric

    flat = MetricField(n, lambda z: np.eye(len(z), dtype=complex), name="flat")
    Rf, _ = kahler_curvature(flat, np.full(n, 0.1 + 0.2j), step)
    flat_norm = float(np.linalg.norm(Rf))

    field = rotsym_metric(RotSymParams(n, k, 0.0))
    z0 = np.zeros(n, dtype=complex)
    R, G = kahler_curvature(field, z0, step)
    ric = np.einsum("ji,ijkl->kl", np.linalg.inv(G), R)
    raw = np.real(linalg.eigh(0.5 * (ric + ric.conj().T), G, eigvals_only=True))
    rho_factor = float(np.mean(-2 * (n + 1) * k / raw))

    P = bochner_fit(0.5 * (ric + ric.conj().T), G)
    B = bochner_form(P, G).ravel()
    form_factor = float(np.real(np.vdot(B, R.ravel()) / np.vdot(B, B)))

    # S = s G^-1 P must give H = S - tr S/(n+2) with eigenvalue k/(n+2)
    S = np.linalg.solve(G, P)
    Hs = S - np.trace(S) / (n + 2) * np.eye(n)
    s_factor = float(np.real(k / (n + 2) / np.mean(np.linalg.eigvals(Hs))))
    return Calibration(round(rho_factor, 6), round(s_factor, 6), round(form_factor, 6)), flat_norm
