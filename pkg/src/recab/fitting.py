"""Gradient-descent fitting of posterior logits under each divergence estimator.

Plain fixed-step descent, with the shift-invariance gauge fixed by re-centering
the log-logits to zero mean after every step. Gradients are analytic for the
closed-form bound and the categorical approximation; the Monte-Carlo objective
uses central finite differences with common random numbers (the same Gumbel
draws on both sides of each difference, redrawn every iteration).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    RelaxedCategorical,
    _log_density_impl,
    _softmax,
    reparameterize_batch,
    standard_gumbel_matrix,
)
from .divergence import (
    CA,
    MC,
    RECAB,
    gaussian_kld,
    kld_categorical_approx,
    recab,
    recab_grad_posterior_log_logits,
)

FIT_ESTIMATORS = frozenset({MC, CA, RECAB})


@dataclass(frozen=True)
class FitConfig:
    """Knobs for fit_posterior; mc_samples and mc_fd_step only matter for MC fits."""

    estimator: str
    step_size: float = 0.05
    max_iters: int = 5000
    grad_tolerance: float = 1e-5
    mc_samples: int = 32
    mc_fd_step: float = 1e-2
    seed: int = 0
    track_trajectory: bool = False

    def __post_init__(self):
        if self.estimator not in FIT_ESTIMATORS:
            raise ValueError(f"estimator must be one of {sorted(FIT_ESTIMATORS)}, got {self.estimator!r}")
        if not self.step_size > 0.0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.grad_tolerance > 0.0:
            raise ValueError(f"grad_tolerance must be positive, got {self.grad_tolerance}")
        if self.mc_samples < 2:
            raise ValueError(f"mc_samples must be >= 2, got {self.mc_samples}")
        if not self.mc_fd_step > 0.0:
            raise ValueError(f"mc_fd_step must be positive, got {self.mc_fd_step}")


@dataclass(frozen=True)
class FitResult:
    fitted: RelaxedCategorical
    final_value: float
    iterations: int
    converged: bool
    trajectory: tuple[tuple[int, float], ...] | None = None

    def __post_init__(self):
        if not math.isfinite(self.final_value):
            raise ValueError(f"final_value must be finite, got {self.final_value!r}")


class FitDivergenceError(RuntimeError):
    """Raised when the descent produces a non-finite value; carries the last good state."""

    def __init__(self, message: str, last_result: FitResult | None):
        super().__init__(message)
        self.last_result = last_result


def _mc_objective(log_logits: np.ndarray, temperature: float,
                  target: RelaxedCategorical, noise: np.ndarray) -> float:
    q = RelaxedCategorical(log_logits, temperature)
    zs = reparameterize_batch(q, noise)
    log_zs = np.log(zs)
    ratios = _log_density_impl(q, zs, log_zs) - _log_density_impl(target, zs, log_zs)
    return float(ratios.mean())


def _ca_value_and_grad(log_logits: np.ndarray, target_probs: np.ndarray):
    probs = _softmax(log_logits)
    terms = np.where(probs > 0.0, probs * (np.log(probs) - np.log(target_probs)), 0.0)
    value = float(terms.sum())
    grad = np.where(probs > 0.0, probs * (np.log(probs) - np.log(target_probs) - value), 0.0)
    return value, grad


def fit_posterior(
    target: RelaxedCategorical,
    init: RelaxedCategorical | None,
    posterior_temperature: float,
    cfg: FitConfig,
) -> FitResult:
    """Minimize estimator(q || target) over the posterior log-logits.

    The posterior temperature stays fixed for the whole fit; init supplies the
    starting logits (uniform when None). Convergence means the gradient
    infinity-norm dropped below cfg.grad_tolerance.
    """
    if init is None:
        theta = np.zeros(target.n)
    else:
        if init.n != target.n:
            raise ValueError(f"init has {init.n} categories but target has {target.n}")
        theta = init.log_logits.copy()
    theta -= theta.mean()
    posterior_temperature = float(posterior_temperature)

    rng = np.random.default_rng(cfg.seed)
    target_probs = _softmax(target.log_logits)

    def evaluate(logits: np.ndarray):
        if cfg.estimator == RECAB:
            q = RelaxedCategorical(logits, posterior_temperature)
            return recab(q, target).value, recab_grad_posterior_log_logits(q, target)
        if cfg.estimator == CA:
            return _ca_value_and_grad(logits, target_probs)
        noise = standard_gumbel_matrix(rng, cfg.mc_samples, target.n)
        value = _mc_objective(logits, posterior_temperature, target, noise)
        grad = np.empty(target.n)
        h = cfg.mc_fd_step
        for j in range(target.n):
            bumped = logits.copy()
            bumped[j] += h
            upper = _mc_objective(bumped, posterior_temperature, target, noise)
            bumped[j] -= 2.0 * h
            lower = _mc_objective(bumped, posterior_temperature, target, noise)
            grad[j] = (upper - lower) / (2.0 * h)
        return value, grad

    def snapshot(logits, value, iterations, converged, trace):
        return FitResult(
            fitted=RelaxedCategorical(logits, posterior_temperature),
            final_value=value,
            iterations=iterations,
            converged=converged,
            trajectory=tuple(trace) if cfg.track_trajectory else None,
        )

    trace: list[tuple[int, float]] = []
    value, grad = evaluate(theta)
    if not (math.isfinite(value) and np.all(np.isfinite(grad))):
        raise FitDivergenceError("objective non-finite at the starting point", None)
    trace.append((0, value))
    iterations = 0
    converged = bool(np.abs(grad).max() < cfg.grad_tolerance)

    for iteration in range(1, cfg.max_iters + 1):
        if converged:
            break
        candidate = theta - cfg.step_size * grad
        candidate -= candidate.mean()
        if not np.all(np.isfinite(candidate)):
            raise FitDivergenceError(
                f"log-logits diverged at iteration {iteration}",
                snapshot(theta, value, iterations, False, trace),
            )
        new_value, new_grad = evaluate(candidate)
        if not (math.isfinite(new_value) and np.all(np.isfinite(new_grad))):
            raise FitDivergenceError(
                f"objective non-finite at iteration {iteration}",
                snapshot(theta, value, iterations, False, trace),
            )
        theta, value, grad = candidate, new_value, new_grad
        iterations = iteration
        trace.append((iteration, value))
        converged = bool(np.abs(grad).max() < cfg.grad_tolerance)

    return snapshot(theta, value, iterations, converged, trace)


@dataclass(frozen=True)
class DiagonalGaussian:
    """Mean and log-variance of a diagonal Gaussian."""

    mean: np.ndarray
    log_var: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float)
        log_var = np.array(self.log_var, dtype=float)
        if mean.shape != log_var.shape or mean.ndim != 1:
            raise ValueError("mean and log_var must be 1-d vectors of the same length")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(log_var))):
            raise ValueError("Gaussian parameters must be finite")
        mean.flags.writeable = False
        log_var.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "log_var", log_var)


def joint_objective(
    recon_loglik: float,
    q_cont: DiagonalGaussian,
    p_cont: DiagonalGaussian,
    q_disc: RelaxedCategorical,
    prior_disc: RelaxedCategorical,
) -> float:
    """Training objective over joint continuous and discrete latents.

    recon_loglik minus the Gaussian KLD minus the closed-form discrete bound.
    Because the discrete term upper-bounds the true KLD, this value never
    exceeds the sampled ELBO beyond Monte-Carlo error.
    """
    recon_loglik = float(recon_loglik)
    if not math.isfinite(recon_loglik):
        raise ValueError(f"recon_loglik must be finite, got {recon_loglik!r}")
    continuous = gaussian_kld(q_cont.mean, q_cont.log_var, p_cont.mean, p_cont.log_var)
    discrete = recab(q_disc, prior_disc).value
    return recon_loglik - continuous - discrete
