import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vbkreg.quadrature import QuadratureError, integrate, integrate_piecewise


class TestIntegrate:
    def test_polynomial_exact(self):
        assert integrate(lambda x: x**5 - 3 * x**2 + 1, -1.0, 2.0) == pytest.approx(
            (2**6 - 1) / 6 - (8 + 1) + 3, abs=1e-13
        )

    def test_smooth_transcendental(self):
        assert integrate(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1, abs=1e-13)
        assert integrate(np.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-13)

    def test_identically_zero_terminates(self):
        assert integrate(lambda x: np.zeros_like(x), 0.0, 1.0) == 0.0

    def test_zero_width(self):
        assert integrate(np.exp, 1.0, 1.0) == 0.0

    def test_kink_needs_refinement(self):
        # |x| has a kink at 0 away from any panel edge for odd panel counts
        assert integrate(np.abs, -1.0, 2.0, tol=1e-10) == pytest.approx(2.5, abs=1e-10)

    def test_nonconvergence_raises(self):
        with pytest.raises(QuadratureError):
            integrate(lambda x: np.sin(1.0 / np.where(x == 0, 1e-300, x)), 0.0, 1.0, tol=1e-15, max_level=3)

    def test_piecewise_matches_split(self):
        f = np.abs
        assert integrate_piecewise(f, [-1.0, 0.0, 2.0]) == pytest.approx(2.5, abs=1e-14)


@given(
    a=st.floats(-3, 3),
    w=st.floats(0.01, 4),
    coef=st.lists(st.floats(-5, 5), min_size=1, max_size=12),
)
def test_polynomials_integrate_exactly(a, w, coef):
    p = np.polynomial.Polynomial(coef)
    anti = p.integ()
    b = a + w
    expected = anti(b) - anti(a)
    assert integrate(p, a, b) == pytest.approx(expected, abs=1e-10 * (1 + abs(expected)))
