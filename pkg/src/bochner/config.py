"""Tolerance record shared by the numerical routines.

Every routine that branches on an approximate equality takes a ``Tolerances``
instance explicitly; nothing is read from the environment.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    # eigenvalues of H are one cluster when |l_i - l_j| <= cluster * (1 + |H|)
    cluster: float = 1e-8
    # zero tests for |T_a|^2 and V_a, same relative family
    zero: float = 1e-8
    # a polynomial root is real when |Im r| <= root_imag * (1 + |r|)
    root_imag: float = 1e-8
    # companion eigenvalues of a k-fold root scatter like eps**(1/k); this is the
    # radius used to gather candidates before the multiplicity is verified
    root_gather: float = 1e-4
    # negative squares above -clamp are boundary round-off
    clamp: float = 1e-10
    # coefficient residual allowed in exact polynomial divisions
    division: float = 1e-8
    # unitarity defect allowed for group elements
    unitary: float = 1e-12
    # Hermitian defect allowed for matrices handed to us
    hermitian: float = 1e-12

    def with_overrides(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT = Tolerances()
