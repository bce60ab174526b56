import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from cogmac.errors import NumericalError
from cogmac.quadrature import integrate


def test_polynomial_exact():
    # K15 is exact for degree 22 on a single interval
    res = integrate(lambda x: 7 * x**6 - 3 * x**2 + 1, 0.0, 2.0, initial=1)
    assert res.value == pytest.approx(2**7 - 2**3 + 2, rel=1e-14)


def test_exponential_integral():
    # E_1(1) on a truncated range, tail below double rounding
    res = integrate(lambda t: np.exp(-t) / t, 1.0, 60.0, rtol=1e-12)
    assert res.value == pytest.approx(special.exp1(1.0), rel=1e-11)


def test_endpoint_singularity_tolerated():
    res = integrate(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, rtol=1e-8, max_intervals=20_000)
    assert res.value == pytest.approx(2.0, rel=1e-7)


def test_reversed_and_empty_interval():
    f = lambda x: np.cos(x)
    assert integrate(f, 1.0, 0.0).value == pytest.approx(-math.sin(1.0), rel=1e-12)
    assert integrate(f, 0.5, 0.5).value == 0.0


def test_budget_exhaustion_raises_with_residual():
    with pytest.raises(NumericalError) as info:
        integrate(lambda x: np.sin(1.0 / x) / x, 1e-9, 1.0, rtol=1e-14, max_intervals=50)
    assert info.value.residual > 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5.0), st.floats(0.0, 3.0), st.floats(0.1, 4.0))
def test_gaussian_mass(sigma, a, width):
    f = lambda x: np.exp(-0.5 * (x / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
    want = 0.5 * (special.erf((a + width) / (sigma * math.sqrt(2)))
                  - special.erf(a / (sigma * math.sqrt(2))))
    got = integrate(f, a, a + width, rtol=1e-11, atol=1e-16).value
    assert got == pytest.approx(want, rel=1e-9, abs=1e-15)
