"""Relaxed categorical (Gumbel-softmax) distribution: parameters, sampling, density.

A relaxed categorical over n >= 2 categories is parameterized by a free vector
of log-logits (only defined up to a uniform additive shift) and a strictly
positive temperature. Samples live in the interior of the probability simplex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import log_gamma

# Stored simplex coordinates sum to one within this tolerance.
SIMPLEX_SUM_TOL = 1e-9
# Construction renormalizes coordinate sums within this tolerance and rejects beyond.
SIMPLEX_RENORM_TOL = 1e-6

_TINY = np.finfo(float).tiny  # smallest positive normal double


def _frozen_vector(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise ValueError(f"{name} needs at least 2 entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} entries must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class RelaxedCategorical:
    """Parameter record: log-logits plus temperature.

    Two records whose log_logits differ by a uniform additive constant describe
    the same distribution.
    """

    log_logits: np.ndarray
    temperature: float

    def __post_init__(self):
        object.__setattr__(self, "log_logits", _frozen_vector(self.log_logits, "log_logits"))
        temp = float(self.temperature)
        if not (temp > 0.0 and math.isfinite(temp)):
            raise ValueError(f"temperature must be a finite positive real, got {temp}")
        object.__setattr__(self, "temperature", temp)

    @property
    def n(self) -> int:
        """Number of categories."""
        return self.log_logits.shape[0]

    @property
    def probs(self) -> np.ndarray:
        """Normalized logits (the categorical probabilities alpha-hat)."""
        return _softmax(self.log_logits)

    @classmethod
    def from_probs(cls, probs, temperature: float) -> "RelaxedCategorical":
        p = np.asarray(probs, dtype=float)
        if np.any(p <= 0.0):
            raise ValueError("probabilities must be strictly positive")
        return cls(np.log(p), temperature)


@dataclass(frozen=True)
class GumbelVector:
    """A vector of standard Gumbel draws."""

    noise: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "noise", _frozen_vector(self.noise, "noise"))

    @property
    def n(self) -> int:
        return self.noise.shape[0]


@dataclass(frozen=True)
class SimplexPoint:
    """A strictly interior point of the probability simplex.

    Construction renormalizes coordinate sums that are off by at most
    SIMPLEX_RENORM_TOL (rounding from softmax) and rejects anything worse.
    """

    coords: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise ValueError("simplex point must be a vector of length >= 2")
        if not np.all(np.isfinite(arr)):
            raise ValueError("simplex coordinates must be finite")
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise ValueError("simplex coordinates must lie strictly inside (0, 1)")
        total = arr.sum()
        if abs(total - 1.0) > SIMPLEX_RENORM_TOL:
            raise ValueError(f"coordinates sum to {total!r}, too far from 1 to renormalize")
        if abs(total - 1.0) > SIMPLEX_SUM_TOL:
            arr = arr / total
        arr.flags.writeable = False
        object.__setattr__(self, "coords", arr)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=-1, keepdims=True)
    out = np.exp(shifted)
    out /= out.sum(axis=-1, keepdims=True)
    return out


def _logsumexp(scores: np.ndarray) -> np.ndarray:
    top = scores.max(axis=-1, keepdims=True)
    out = np.log(np.exp(scores - top).sum(axis=-1))
    out += np.squeeze(top, axis=-1)
    return out


def sample_standard_gumbel(rng: np.random.Generator, n: int) -> GumbelVector:
    """Draw n independent standard Gumbel variates by inverse CDF.

    Uniform draws are clamped one representable step away from {0, 1} before
    the double log, so the output is always finite.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 categories, got {n}")
    return GumbelVector(_gumbel_from_uniform(rng.random(n)))


def standard_gumbel_matrix(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    """(count, n) matrix of standard Gumbel draws, same transform as the vector path."""
    if n < 2:
        raise ValueError(f"need n >= 2 categories, got {n}")
    if count < 0:
        raise ValueError(f"count must be nonnegative, got {count}")
    return _gumbel_from_uniform(rng.random((count, n)))


def _gumbel_from_uniform(u: np.ndarray) -> np.ndarray:
    np.clip(u, np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0), out=u)
    np.log(u, out=u)
    np.negative(u, out=u)
    np.log(u, out=u)
    np.negative(u, out=u)
    return u


def reparameterize(params: RelaxedCategorical, g: GumbelVector) -> SimplexPoint:
    """Map Gumbel noise to a simplex sample: softmax((log_logits + g) / temperature)."""
    if g.n != params.n:
        raise ValueError(f"noise length {g.n} does not match parameter length {params.n}")
    return SimplexPoint(_reparameterize_impl(params, g.noise))


def reparameterize_batch(params: RelaxedCategorical, noise: np.ndarray) -> np.ndarray:
    """Row-wise reparameterization of a (count, n) noise matrix."""
    noise = np.asarray(noise, dtype=float)
    if noise.ndim != 2 or noise.shape[1] != params.n:
        raise ValueError(f"noise must have shape (count, {params.n}), got {noise.shape}")
    return _reparameterize_impl(params, noise)


def _reparameterize_impl(params: RelaxedCategorical, noise: np.ndarray) -> np.ndarray:
    z = _softmax((params.log_logits + noise) / params.temperature)
    # Floor keeps coordinates representable at very low temperatures, where
    # softmax underflows; log(z) stays finite.
    np.maximum(z, _TINY, out=z)
    z /= z.sum(axis=-1, keepdims=True)
    return z


def sample(params: RelaxedCategorical, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw count samples, one per row."""
    return _reparameterize_impl(params, standard_gumbel_matrix(rng, count, params.n))


def log_density(params: RelaxedCategorical, z) -> float:
    """Log density of the relaxed categorical at a single interior simplex point.

    Accepts a SimplexPoint or a raw coordinate vector. The density is taken
    with respect to Lebesgue measure on the first n-1 coordinates.
    """
    coords = z.coords if isinstance(z, SimplexPoint) else np.asarray(z, dtype=float)
    if coords.ndim != 1:
        raise ValueError(f"z must be a single point, got shape {coords.shape}")
    _check_interior(coords, params.n)
    return float(_log_density_impl(params, coords[None, :])[0])


def log_density_batch(params: RelaxedCategorical, zs: np.ndarray) -> np.ndarray:
    """Log density at every row of a (count, n) matrix of interior points."""
    zs = np.asarray(zs, dtype=float)
    if zs.ndim != 2:
        raise ValueError(f"zs must be a (count, n) matrix, got shape {zs.shape}")
    _check_interior(zs, params.n)
    return _log_density_impl(params, zs)


def _check_interior(coords: np.ndarray, n: int) -> None:
    if coords.shape[-1] != n:
        raise ValueError(f"point length {coords.shape[-1]} does not match parameter length {n}")
    if not np.all(np.isfinite(coords)) or np.any(coords <= 0.0):
        raise ValueError("density requires strictly positive coordinates")


def _log_density_impl(params: RelaxedCategorical, zs: np.ndarray, log_zs=None) -> np.ndarray:
    n = params.n
    lam = params.temperature
    if log_zs is None:
        log_zs = np.log(zs)
    scores = params.log_logits - lam * log_zs
    return (
        log_gamma(n)
        + (n - 1) * math.log(lam)
        + params.log_logits.sum()
        - (lam + 1.0) * log_zs.sum(axis=-1)
        - n * _logsumexp(scores)
    )
