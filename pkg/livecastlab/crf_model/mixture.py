"""One-dimensional two-component Gaussian mixtures fit by expectation-maximization."""

from __future__ import annotations

from dataclasses import dataclass
import math
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.special import ndtr

from livecastlab.crf_model.exceptions import InsufficientSamplesError

if TYPE_CHECKING:
    from collections.abc import Iterable

MIN_STARTUP_SAMPLES = 10
MAX_ITERATIONS = 100
# Convergence threshold on the change of the mean per-sample log-likelihood
LOG_LIKELIHOOD_TOLERANCE = 1e-6
STD_FLOOR_KBPS = 1.0
MIN_COMPONENT_WEIGHT = 0.02
# Keeps a collapsing component finite while EM is still running
_EM_STD_EPSILON = 1e-3

_LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@dataclass(frozen=True)
class GaussianMixture:
    weights: tuple[float, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]

    @classmethod
    def single(cls, mean: float, std: float) -> GaussianMixture:
        return cls(weights=(1.0,), means=(float(mean),), stds=(max(float(std), STD_FLOOR_KBPS),))

    @property
    def mean(self) -> float:
        return float(np.dot(self.weights, self.means))

    def cdf(self, b):
        """Mixture CDF, evaluated elementwise for array input."""
        b = np.asarray(b, dtype=np.float64)
        weights = np.asarray(self.weights)
        means = np.asarray(self.means)
        stds = np.asarray(self.stds)
        z = (b[..., np.newaxis] - means) / stds
        return np.dot(ndtr(z), weights)

    def to_dict(self) -> dict[str, Any]:
        return {'weights': list(self.weights), 'means': list(self.means), 'stds': list(self.stds)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GaussianMixture:
        return cls(
            weights=tuple(data['weights']), means=tuple(data['means']), stds=tuple(data['stds'])
        )


def _log_densities(x: np.ndarray, weights, means, stds) -> np.ndarray:
    z = (x[:, np.newaxis] - means) / stds
    return np.log(weights) - np.log(stds) - _LOG_SQRT_2PI - 0.5 * z**2


def _single(x: np.ndarray) -> GaussianMixture:
    return GaussianMixture.single(float(x.mean()), float(x.std()))


def fit_mixture(
    samples: Iterable[float],
    *,
    min_samples: int = MIN_STARTUP_SAMPLES,
    max_iterations: int = MAX_ITERATIONS,
    tolerance: float = LOG_LIKELIHOOD_TOLERANCE,
) -> GaussianMixture:
    """
    Fit a two-component Gaussian mixture to bitrate samples.

    Components start at the 25% and 75% sample quantiles, so fits are deterministic. A fit
    whose component is degenerate (std below the floor or weight below the minimum) collapses
    into a single Gaussian over all samples.
    """
    x = np.fromiter(samples, dtype=np.float64)
    if x.size < min_samples:
        raise InsufficientSamplesError(
            f'Need at least {min_samples} samples to fit a mixture, got {x.size}'
        )
    if np.ptp(x) == 0:
        return _single(x)

    weights = np.array([0.5, 0.5])
    means = np.quantile(x, [0.25, 0.75])
    stds = np.full(2, max(float(x.std()), _EM_STD_EPSILON))

    previous = -math.inf
    for _ in range(max_iterations):
        # E-step
        log_densities = _log_densities(x, weights, means, stds)
        log_norm = np.logaddexp.reduce(log_densities, axis=1)
        responsibilities = np.exp(log_densities - log_norm[:, np.newaxis])

        # M-step
        counts = responsibilities.sum(axis=0)
        if np.any(counts <= 0):
            return _single(x)
        weights = counts / x.size
        means = responsibilities.T @ x / counts
        variances = (responsibilities * (x[:, np.newaxis] - means) ** 2).sum(axis=0) / counts
        stds = np.maximum(np.sqrt(variances), _EM_STD_EPSILON)

        current = float(log_norm.mean())
        if abs(current - previous) < tolerance:
            break
        previous = current

    if np.any(stds < STD_FLOOR_KBPS) or np.any(weights < MIN_COMPONENT_WEIGHT):
        return _single(x)

    order = np.argsort(means)
    return GaussianMixture(
        weights=tuple(float(w) for w in weights[order]),
        means=tuple(float(m) for m in means[order]),
        stds=tuple(float(s) for s in stds[order]),
    )
