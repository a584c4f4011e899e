import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recab.special import EULER_GAMMA, digamma_positive_integer, harmonic, log_gamma

# Euler-Mascheroni, written out independently of the library constant.
GAMMA_REF = 0.5772156649015328606


def test_euler_gamma_constant():
    assert EULER_GAMMA == pytest.approx(GAMMA_REF, abs=1e-18)


def test_harmonic_small_values():
    assert harmonic(1) == 1.0
    assert harmonic(2) == 1.5
    assert harmonic(3) == pytest.approx(1.0 + 0.5 + 1.0 / 3.0, abs=1e-15)


def test_harmonic_rejects_nonpositive():
    with pytest.raises(ValueError):
        harmonic(0)
    with pytest.raises(ValueError):
        harmonic(-3)


def test_digamma_at_one_is_minus_gamma():
    assert digamma_positive_integer(1) == pytest.approx(-GAMMA_REF, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5, 10, 40])
def test_digamma_matches_harmonic_identity(n):
    assert digamma_positive_integer(n) == pytest.approx(-GAMMA_REF + harmonic(n - 1), abs=1e-13)


def test_digamma_rejects_nonpositive():
    with pytest.raises(ValueError):
        digamma_positive_integer(0)


def test_log_gamma_exact_roots():
    # Gamma(1) = Gamma(2) = 1; the approximation should be essentially exact there.
    assert abs(log_gamma(1.0)) < 1e-13
    assert abs(log_gamma(2.0)) < 1e-13


def test_log_gamma_against_lgamma_grid():
    # Contract: 1e-12 relative on (0, 50], with an absolute floor of 1e-12
    # near the zeros of lgamma at x = 1 and x = 2.
    xs = np.concatenate(
        [
            np.linspace(1e-4, 0.5, 400),
            np.linspace(0.5, 3.0, 800),
            np.linspace(3.0, 50.0, 800),
        ]
    )
    for x in xs:
        ref = math.lgamma(x)
        assert abs(log_gamma(float(x)) - ref) <= 1e-12 * max(abs(ref), 1.0), x


@given(st.floats(min_value=1e-3, max_value=50.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_log_gamma_against_lgamma_random(x):
    ref = math.lgamma(x)
    assert abs(log_gamma(x) - ref) <= 1e-12 * max(abs(ref), 1.0)


def test_log_gamma_recurrence():
    # Gamma(x + 1) = x Gamma(x)
    for x in [0.3, 0.9, 2.5, 7.7, 20.1]:
        assert log_gamma(x + 1.0) == pytest.approx(log_gamma(x) + math.log(x), rel=1e-12, abs=1e-12)


def test_log_gamma_rejects_bad_domain():
    for bad in [0.0, -1.5, math.inf, math.nan]:
        with pytest.raises(ValueError):
            log_gamma(bad)
