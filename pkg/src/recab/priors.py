"""Class-conditioned relaxed categorical priors built from one-hot codes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RelaxedCategorical

DEFAULT_EPSILON = 0.01


@dataclass(frozen=True)
class OneHotCode:
    """A one-hot class label over n >= 2 categories."""

    code: np.ndarray

    def __post_init__(self):
        arr = np.array(self.code, dtype=int)
        if arr.ndim != 1 or arr.shape[0] < 2:
            raise ValueError("code must be a vector of length >= 2")
        if not np.all((arr == 0) | (arr == 1)) or arr.sum() != 1:
            raise ValueError("code must contain exactly one 1 and zeros elsewhere")
        arr.flags.writeable = False
        object.__setattr__(self, "code", arr)

    @classmethod
    def from_index(cls, hot: int, n: int) -> "OneHotCode":
        code = np.zeros(n, dtype=int)
        code[hot] = 1
        return cls(code)

    @property
    def n(self) -> int:
        return self.code.shape[0]

    @property
    def hot_index(self) -> int:
        return int(np.argmax(self.code))


def discriminative_logits(c: OneHotCode, epsilon: float) -> np.ndarray:
    """Smoothed class logits: 1 - (n-1) * epsilon at the hot index, epsilon elsewhere.

    epsilon must stay below 1/n so the hot entry remains strictly largest
    (and the sup limit epsilon -> 1/n recovers the uniform vector).
    """
    n = c.n
    if not (0.0 < epsilon < 1.0 / n) or not math.isfinite(epsilon):
        raise ValueError(f"epsilon must lie in (0, 1/{n}) for {n} categories, got {epsilon}")
    logits = np.full(n, epsilon)
    logits[c.hot_index] = 1.0 - (n - 1) * epsilon
    return logits


def make_discriminative_prior(
    c: OneHotCode, epsilon: float, prior_temperature: float
) -> RelaxedCategorical:
    """Relaxed categorical prior whose logits encode the class label."""
    return RelaxedCategorical(np.log(discriminative_logits(c, epsilon)), prior_temperature)
