import numpy as np
import pytest
from hypothesis import given, strategies as st

from bochner.errors import InconsistencyError, ParameterError
from bochner.polynomial import RealPolynomial


def test_rejects_non_monic():
    with pytest.raises(ParameterError):
        RealPolynomial([2.0, 1.0])


def test_multiple_roots_are_gathered():
    p = RealPolynomial.from_roots([(2.0, 3), (-1.0, 2), (0.5, 1)])
    assert p.real_roots() == [(2.0, 3), (0.5, 1), (-1.0, 2)]


def test_complex_pair():
    p = RealPolynomial([1.0, 0.0, 1.0, 0.0])   # t^3 + t
    assert p.real_roots() == [(0.0, 1)]
    assert sorted(complex(r).imag for r, _ in p.complex_roots()) == [-1.0, 1.0]


def test_exact_division_and_failure():
    p = RealPolynomial.from_roots([(1.0, 2), (-2.0, 1)])
    q = RealPolynomial.from_roots([(1.0, 1)])
    assert p.divide(q).close_to(RealPolynomial.from_roots([(1.0, 1), (-2.0, 1)]), 1e-12)
    with pytest.raises(InconsistencyError):
        p.divide(RealPolynomial.from_roots([(3.0, 1)]))


@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(1, 3)), min_size=1, max_size=4, unique_by=lambda x: x[0]))
def test_integer_roots_recovered(spec):
    p = RealPolynomial.from_roots([(float(r), k) for r, k in spec])
    want = sorted([(float(r), k) for r, k in spec], key=lambda x: -x[0])
    got = p.real_roots()
    assert [k for _, k in got] == [k for _, k in want]
    assert np.allclose([r for r, _ in got], [r for r, _ in want], atol=1e-9)


def test_derivative_evaluation():
    p = RealPolynomial([1.0, 0.0, -1.0, 0.0])
    assert p.eval_deriv(2.0, 1) == pytest.approx(11.0)
    assert p.eval_deriv(2.0, 2) == pytest.approx(12.0)
