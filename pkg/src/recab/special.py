"""Scalar special functions used by the closed-form divergence bounds."""

import math

# Euler-Mascheroni constant, 20 significant digits.
EULER_GAMMA = 0.57721566490153286060

# Lanczos coefficients for g = 7, giving ~15 correct digits on the real axis.
_LANCZOS_G = 7.0
_LANCZOS_COEFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def harmonic(n: int) -> float:
    """Partial harmonic sum H_n = 1 + 1/2 + ... + 1/n."""
    if n < 1:
        raise ValueError(f"harmonic() needs n >= 1, got {n}")
    return sum(1.0 / k for k in range(1, n + 1))


def digamma_positive_integer(n: int) -> float:
    """Digamma psi(n) at a positive integer: -gamma + H_{n-1}."""
    if n < 1:
        raise ValueError(f"digamma_positive_integer() needs n >= 1, got {n}")
    if n == 1:
        return -EULER_GAMMA
    return -EULER_GAMMA + harmonic(n - 1)


def log_gamma(x: float) -> float:
    """log of the Gamma function for x > 0, via the Lanczos approximation.

    Arguments below 0.5 go through the reflection formula so the series is
    only ever evaluated where it converges fast.
    """
    if not x > 0.0 or math.isinf(x) or math.isnan(x):
        raise ValueError(f"log_gamma() needs finite x > 0, got {x}")
    if x < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x); sin(pi x) > 0 on (0, 0.5).
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    z = x - 1.0
    series = _LANCZOS_COEFS[0]
    for i, c in enumerate(_LANCZOS_COEFS[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_TWO_PI + (z + 0.5) * math.log(t) - t + math.log(series)
