"""
CRF-to-bitrate distributions learned online from encoder output.

For every CRF the model keeps the bitrates observed over the last 55 seconds. Once a CRF has
enough observations its distribution is a fitted Gaussian mixture; before that, a pre-recorded
default distribution stands in.
"""

from __future__ import annotations

from collections import deque
import json
import logging
from typing import TYPE_CHECKING

import numpy as np

from livecastlab import settings
from livecastlab.crf_model.exceptions import (
    InsufficientSamplesError,
    InvalidObservationError,
    UnknownCrfError,
)
from livecastlab.crf_model.mixture import MIN_STARTUP_SAMPLES, GaussianMixture, fit_mixture

if TYPE_CHECKING:
    from pathlib import Path

    from livecastlab.traces import VideoTrace

logger = logging.getLogger(__name__)

WINDOW_S = 55


def load_default_distributions(
    path: Path | str = settings.DEFAULT_CRF_DISTRIBUTIONS_PATH,
) -> dict[int, GaussianMixture]:
    with open(path, encoding='utf-8') as f:
        table = json.load(f)
    return {
        int(crf): GaussianMixture.single(entry['mean_kbps'], entry['std_kbps'])
        for crf, entry in table.items()
    }


def estimate_default_distributions(video: VideoTrace) -> dict[str, dict[str, float]]:
    """Single-Gaussian default table for each CRF of a video trace, in the JSON layout."""
    table = {}
    for crf in video.crfs:
        bitrates = np.array([second[crf].bitrate_kbps for second in video])
        table[str(crf)] = {'mean_kbps': float(bitrates.mean()), 'std_kbps': float(bitrates.std())}
    return table


class CrfBitrateModel:
    def __init__(
        self,
        defaults: dict[int, GaussianMixture] | None = None,
        *,
        window_s: int = WINDOW_S,
        min_startup: int = MIN_STARTUP_SAMPLES,
    ):
        self.defaults = dict(defaults if defaults is not None else load_default_distributions())
        self.crfs: tuple[int, ...] = tuple(sorted(self.defaults))
        self.window_s = window_s
        self.min_startup = min_startup
        self._queues: dict[int, deque[tuple[int, float]]] = {crf: deque() for crf in self.crfs}
        self._distributions: dict[int, GaussianMixture] = dict(self.defaults)
        # CRFs whose queue changed since their distribution was last rebuilt
        self._stale: set[int] = set()

    @property
    def max_crf(self) -> int:
        return self.crfs[-1]

    def _check(self, crf: int) -> None:
        if crf not in self._queues:
            raise UnknownCrfError(crf)

    def queue(self, crf: int) -> list[tuple[int, float]]:
        self._check(crf)
        return list(self._queues[crf])

    def observe(self, crf: int, bitrate_kbps: float, t: int) -> CrfBitrateModel:
        self._check(crf)
        if not bitrate_kbps > 0:
            raise InvalidObservationError
        self._queues[crf].append((t, float(bitrate_kbps)))
        self._stale.add(crf)
        self._evict(t)
        return self

    def _evict(self, now: int) -> None:
        oldest_allowed = now - self.window_s
        for crf, queue in self._queues.items():
            evicted = False
            while queue and queue[0][0] <= oldest_allowed:
                queue.popleft()
                evicted = True
            if evicted:
                self._stale.add(crf)

    def distribution_for(self, crf: int) -> GaussianMixture:
        self._check(crf)
        if crf in self._stale:
            self._stale.discard(crf)
            bitrates = [bitrate for _, bitrate in self._queues[crf]]
            try:
                self._distributions[crf] = fit_mixture(bitrates, min_samples=self.min_startup)
            except InsufficientSamplesError:
                self._distributions[crf] = self.defaults[crf]
        return self._distributions[crf]

    def cdf_below(self, crf: int, b):
        """Probability that the bitrate of `crf` stays below b."""
        return self.distribution_for(crf).cdf(b)

    def expected_bitrate(self, crf: int) -> float:
        return self.distribution_for(crf).mean
