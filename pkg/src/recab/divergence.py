"""KL divergence estimators for relaxed categorical pairs.

Three routes to D_KL(q || p):

* ``kld_monte_carlo`` - sample average of log-density ratios (unbiased, noisy),
* ``kld_categorical_approx`` - the KLD of the underlying categorical
  distributions (deterministic, blind to both temperatures),
* ``recab`` - a closed-form upper bound, with a matching Jensen lower bound
  and a logit-independent gap between the two.

Also hosts the closed-form diagonal-Gaussian KLD used when assembling joint
objectives over continuous and discrete latents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    RelaxedCategorical,
    _log_density_impl,
    _logsumexp,
    _softmax,
    reparameterize_batch,
    standard_gumbel_matrix,
)
from .special import EULER_GAMMA, digamma_positive_integer, harmonic, log_gamma

MC = "mc"
CA = "ca"
RECAB = "recab"
RECAB_LOWER = "recab_lower"

ESTIMATOR_TAGS = frozenset({MC, CA, RECAB, RECAB_LOWER})


@dataclass(frozen=True)
class DivergenceEstimate:
    """A divergence value with its estimator tag; MC estimates carry a standard error."""

    value: float
    estimator: str
    std_error: float | None = None
    sample_count: int | None = None

    def __post_init__(self):
        if self.estimator not in ESTIMATOR_TAGS:
            raise ValueError(f"unknown estimator tag {self.estimator!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"divergence estimate is not finite: {self.value!r}")
        if (self.std_error is not None) != (self.estimator == MC):
            raise ValueError("std_error must be present exactly for Monte-Carlo estimates")
        if self.std_error is not None and not self.std_error >= 0.0:
            raise ValueError(f"std_error must be nonnegative, got {self.std_error!r}")


def temperature_ratio(prior_temperature: float, posterior_temperature: float) -> float:
    """Ratio t = l / lambda driving the closed-form bound."""
    for name, temp in (("prior", prior_temperature), ("posterior", posterior_temperature)):
        if not (temp > 0.0 and math.isfinite(temp)):
            raise ValueError(f"{name} temperature must be a finite positive real, got {temp}")
    t = prior_temperature / posterior_temperature
    if not (t > 0.0 and math.isfinite(t)):
        raise ValueError(f"temperature ratio {t!r} out of range")
    return t


def _check_same_dimension(q: RelaxedCategorical, p: RelaxedCategorical) -> None:
    if q.n != p.n:
        raise ValueError(f"dimension mismatch: posterior has {q.n} categories, prior has {p.n}")


def kld_monte_carlo(
    q: RelaxedCategorical,
    p: RelaxedCategorical,
    count: int,
    rng: np.random.Generator,
) -> DivergenceEstimate:
    """Sample-mean estimate of D_KL(q || p) from `count` reparameterized draws of q.

    The standard error is the unbiased sample standard deviation over sqrt(count).
    """
    _check_same_dimension(q, p)
    if count < 2:
        raise ValueError(f"need at least 2 samples for a standard error, got {count}")
    zs = reparameterize_batch(q, standard_gumbel_matrix(rng, count, q.n))
    log_zs = np.log(zs)
    ratios = _log_density_impl(q, zs, log_zs) - _log_density_impl(p, zs, log_zs)
    return DivergenceEstimate(
        value=float(ratios.mean()),
        estimator=MC,
        std_error=float(ratios.std(ddof=1) / math.sqrt(count)),
        sample_count=count,
    )


def _log_ratios_equal_temperature(
    q: RelaxedCategorical, p: RelaxedCategorical, exponentials: np.ndarray
) -> np.ndarray:
    """Per-sample log q(z) - log p(z) for temperature-matched pairs.

    For z = softmax((log alpha + g) / lam) and e_k = exp(-g_k) ~ Exp(1), the
    ratio collapses exactly to

        sum(log alpha - log a) - n log(sum_k e_k) + n log(sum_k exp(d_k) e_k)

    with d = log a - log alpha, so a row of Exp(1) draws is all a sample costs.
    Equality with the density route is covered by tests.
    """
    d = p.log_logits - q.log_logits
    shift = float(d.max())
    weights = np.exp(d - shift)
    n = q.n
    return (n * shift - float(d.sum())) + n * (
        np.log(exponentials @ weights) - np.log(exponentials.sum(axis=1))
    )


def _kld_mc_equal_temperature(
    q: RelaxedCategorical,
    p: RelaxedCategorical,
    count: int,
    rng: np.random.Generator,
) -> DivergenceEstimate:
    """Monte-Carlo estimate via the equal-temperature shortcut (Exp(1) draws)."""
    if q.temperature != p.temperature:
        raise ValueError("shortcut requires matching temperatures")
    _check_same_dimension(q, p)
    if count < 2:
        raise ValueError(f"need at least 2 samples for a standard error, got {count}")
    exponentials = rng.standard_exponential((count, q.n))
    ratios = _log_ratios_equal_temperature(q, p, exponentials)
    return DivergenceEstimate(
        value=float(ratios.mean()),
        estimator=MC,
        std_error=float(ratios.std(ddof=1) / math.sqrt(count)),
        sample_count=count,
    )


def kld_categorical_approx(q: RelaxedCategorical, p: RelaxedCategorical) -> DivergenceEstimate:
    """Categorical-distribution approximation: KLD of the normalized logits.

    Both logit vectors are normalized to probabilities first; temperatures do
    not enter at all, which is precisely this approximation's blind spot.
    """
    _check_same_dimension(q, p)
    q_probs = _softmax(q.log_logits)
    p_probs = _softmax(p.log_logits)
    terms = np.where(q_probs > 0.0, q_probs * (np.log(q_probs) - np.log(p_probs)), 0.0)
    return DivergenceEstimate(value=float(terms.sum()), estimator=CA)


def recab_constant_term(n: int, t: float) -> float:
    """Logit-independent part of the closed-form bound.

    Depends only on the category count and the temperature ratio, so callers
    with fixed temperatures can compute it once up front.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 categories, got {n}")
    if not (t > 0.0 and math.isfinite(t)):
        raise ValueError(f"temperature ratio must be a finite positive real, got {t}")
    return -(n - 1) * math.log(t) + n * (EULER_GAMMA * t + log_gamma(1.0 + t) - harmonic(n - 1))


def _prior_posterior_scores(q: RelaxedCategorical, p: RelaxedCategorical) -> tuple[float, np.ndarray]:
    _check_same_dimension(q, p)
    t = temperature_ratio(p.temperature, q.temperature)
    return t, p.log_logits - t * q.log_logits


def recab(q: RelaxedCategorical, p: RelaxedCategorical) -> DivergenceEstimate:
    """Closed-form upper bound on D_KL(q || p) for relaxed categorical pairs."""
    t, scores = _prior_posterior_scores(q, p)
    log_softmax = scores - _logsumexp(scores)
    value = recab_constant_term(q.n, t) - float(log_softmax.sum())
    return DivergenceEstimate(value=value, estimator=RECAB)


def recab_lower_bound(q: RelaxedCategorical, p: RelaxedCategorical) -> DivergenceEstimate:
    """Jensen lower-bound counterpart of the upper bound.

    Uses the same KLD decomposition but bounds the awkward expectation from
    below by logsumexp(scores - gamma * t) instead of from above.
    """
    t, scores = _prior_posterior_scores(q, p)
    n = q.n
    value = (
        -(n - 1) * math.log(t)
        - float(scores.sum())
        - (1.0 - t) * n * EULER_GAMMA
        - n * digamma_positive_integer(n)
        + n * (float(_logsumexp(scores)) - EULER_GAMMA * t)
    )
    return DivergenceEstimate(value=value, estimator=RECAB_LOWER)


def recab_gap(n: int, t: float) -> float:
    """Logit-independent distance between the upper and lower bounds: n(lgamma(1+t) + gamma t).

    This is the worst-case slack of the upper bound over the true KLD.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 categories, got {n}")
    if not (t > 0.0 and math.isfinite(t)):
        raise ValueError(f"temperature ratio must be a finite positive real, got {t}")
    return n * (log_gamma(1.0 + t) + EULER_GAMMA * t)


def recab_grad_posterior_log_logits(
    q: RelaxedCategorical, p: RelaxedCategorical
) -> np.ndarray:
    """Gradient of the upper bound with respect to the posterior log-logits.

    Only the log-softmax term depends on the logits; the result always sums to
    zero (shift invariance).
    """
    t, scores = _prior_posterior_scores(q, p)
    return t * (1.0 - q.n * _softmax(scores))


def gaussian_kld(mu_q, log_var_q, mu_p, log_var_p) -> float:
    """Closed-form KLD between diagonal Gaussians, summed over dimensions."""
    mu_q, log_var_q, mu_p, log_var_p = (
        np.asarray(v, dtype=float) for v in (mu_q, log_var_q, mu_p, log_var_p)
    )
    shapes = {v.shape for v in (mu_q, log_var_q, mu_p, log_var_p)}
    if len(shapes) != 1 or mu_q.ndim != 1:
        raise ValueError("all Gaussian parameter vectors must share one 1-d shape")
    return float(
        0.5
        * np.sum(
            np.exp(log_var_q - log_var_p)
            + (mu_q - mu_p) ** 2 * np.exp(-log_var_p)
            - 1.0
            + (log_var_p - log_var_q)
        )
    )
