"""Monic real polynomials with multiplicity-aware root extraction.

Coefficients are stored highest degree first, as numpy's poly* helpers expect.
"""

import numpy as np

from .config import DEFAULT
from .errors import InconsistencyError, ParameterError


def _gather(raw, radius):
    """Union-find on raw roots: i ~ j when |r_i - r_j| <= radius * (1 + |r_i|)."""
    parent = list(range(len(raw)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            if abs(raw[i] - raw[j]) <= radius * (1 + abs(raw[i])):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(len(raw)):
        groups.setdefault(find(i), []).append(raw[i])
    return list(groups.values())


class RealPolynomial:
    """A monic polynomial with real coefficients.

    ``roots`` is a list of (value, multiplicity); real roots come first in
    descending order and are stored as floats, complex roots follow with their
    conjugates listed separately.
    """

    def __init__(self, coeffs, tol=DEFAULT, _roots=None):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float))
        if c.size == 0 or c[0] == 0:
            raise ParameterError("leading coefficient must be nonzero")
        if abs(c[0] - 1.0) > 1e-12:
            raise ParameterError(f"polynomial is not monic (leading {c[0]!r})")
        c = c.copy()
        c[0] = 1.0
        self.coeffs = c
        self.tol = tol
        self._roots = _roots

    # -- construction ---------------------------------------------------
    @classmethod
    def from_roots(cls, roots, tol=DEFAULT):
        """Build from [(value, multiplicity), ...]; complex values must be paired."""
        flat = []
        for r, k in roots:
            flat.extend([r] * int(k))
        coeffs = np.real_if_close(np.poly(flat), tol=1e6) if flat else np.array([1.0])
        if np.iscomplexobj(coeffs):
            raise ParameterError("complex roots must come in conjugate pairs")
        canon = [(float(r.real) if np.isreal(r) else complex(r), int(k)) for r, k in roots]
        return cls(coeffs, tol, _roots=_sort_roots(canon))

    @classmethod
    def one(cls):
        return cls([1.0])

    # -- arithmetic -----------------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, t):
        return np.polyval(self.coeffs, t)

    def deriv(self, k=1):
        return np.polyder(self.coeffs, k)

    def eval_deriv(self, t, k=1):
        if k > self.degree:
            return 0.0 * t
        return np.polyval(np.polyder(self.coeffs, k), t)

    def __mul__(self, other):
        roots = None
        if self._roots is not None and other._roots is not None:
            merged = {}
            for r, k in self._roots + other._roots:
                merged[r] = merged.get(r, 0) + k
            roots = _sort_roots(list(merged.items()))
        return RealPolynomial(np.polymul(self.coeffs, other.coeffs), self.tol, _roots=roots)

    def __pow__(self, k):
        out = RealPolynomial.one()
        for _ in range(k):
            out = out * self
        return out

    def divide(self, other, rtol=None):
        """Exact division; raises when the remainder exceeds the tolerance."""
        rtol = self.tol.division if rtol is None else rtol
        q, r = np.polydiv(self.coeffs, other.coeffs)
        scale = 1.0 + np.max(np.abs(self.coeffs))
        if r.size and np.max(np.abs(r)) > rtol * scale:
            raise InconsistencyError(
                f"division residual {np.max(np.abs(r)):.3e} exceeds {rtol * scale:.3e}")
        return RealPolynomial(q, self.tol)

    def close_to(self, other, atol):
        if self.degree != other.degree:
            return False
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol)

    # -- roots ----------------------------------------------------------
    @property
    def roots(self):
        if self._roots is None:
            self._roots = self._find_roots()
        return self._roots

    def real_roots(self):
        """Distinct real roots (descending) with multiplicities."""
        return [(r, k) for r, k in self.roots if isinstance(r, float)]

    def complex_roots(self):
        return [(r, k) for r, k in self.roots if not isinstance(r, float)]

    def root_values(self):
        return np.array([r for r, _ in self.real_roots()])

    def multiplicity(self, value, atol=1e-7):
        for r, k in self.real_roots():
            if abs(r - value) <= atol * (1 + abs(value)):
                return k
        return 0

    def _find_roots(self):
        if self.degree == 0:
            return []
        raw = np.roots(self.coeffs)
        out = []
        for group in _gather(list(raw), self.tol.root_gather):
            k = len(group)
            centre = self._polish(np.mean(group), k)
            if k > 1 and not self._verify(centre, k):
                for g in group:
                    out.append((self._polish(g, 1), 1))
            else:
                out.append((centre, k))
        canon = []
        for r, k in out:
            if abs(r.imag) <= self.tol.root_imag * (1 + abs(r)):
                canon.append((float(r.real), k))
            else:
                canon.append((complex(r), k))
        if sum(k for _, k in canon) != self.degree:
            raise InconsistencyError("root multiplicities do not add up to the degree")
        return _sort_roots(canon)

    def _polish(self, z, k):
        # Newton on the (k-1)-th derivative, where a k-fold root is simple
        c = np.polyder(self.coeffs, k - 1) if k > 1 else self.coeffs
        d = np.polyder(c)
        z = complex(z)
        for _ in range(50):
            dv = np.polyval(d, z)
            if dv == 0:
                break
            step = np.polyval(c, z) / dv
            z -= step
            if abs(step) <= 1e-16 * (1 + abs(z)):
                break
        return z

    def _verify(self, z, k):
        absc = np.abs(self.coeffs)
        for j in range(k):
            val = abs(np.polyval(np.polyder(self.coeffs, j), z)) if j else abs(np.polyval(self.coeffs, z))
            scale = np.polyval(np.polyder(absc, j), abs(z)) if j else np.polyval(absc, abs(z))
            if val > 1e-10 * (1 + scale):
                return False
        return True

    # -- presentation ---------------------------------------------------
    def __repr__(self):
        return f"RealPolynomial({np.array2string(self.coeffs, precision=6)})"

    def pretty(self, digits=6):
        terms = []
        for i, c in enumerate(self.coeffs):
            p = self.degree - i
            if abs(c) < 10 ** (-digits - 2):
                continue
            cs = f"{c:.{digits}g}"
            mono = "" if p == 0 else ("t" if p == 1 else f"t^{p}")
            if mono and cs in ("1", "-1"):
                cs = cs[:-1]
            terms.append(cs + mono)
        return " + ".join(terms).replace("+ -", "- ") or "0"

    def to_record(self):
        return {"coeffs": [float(c) for c in self.coeffs],
                "real_roots": [[r, k] for r, k in self.real_roots()],
                "complex_roots": [[[r.real, r.imag], k] for r, k in self.complex_roots()]}


def _sort_roots(roots):
    real = sorted([(r, k) for r, k in roots if isinstance(r, float)], key=lambda rk: -rk[0])
    cplx = sorted([(r, k) for r, k in roots if not isinstance(r, float)],
                  key=lambda rk: (-rk[0].real, -rk[0].imag))
    return real + cplx


def from_coefficients_low(c):
    """Monic polynomial t^d + c[0] t^{d-1} + ... + c[d-1]."""
    return RealPolynomial(np.concatenate([[1.0], np.asarray(c, dtype=float)]))
