"""
Probabilistic network forecasters.

A predictor turns the recent per-second history into, for each of the next `horizon` seconds,
a bandwidth PMF and a loss-ratio PMF. The scheduler only depends on that contract.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import logging
from typing import TYPE_CHECKING, ClassVar, NamedTuple

import numpy as np

from livecastlab.distributions import Grid, Pmf, pmf_expect
from livecastlab.predictor.exceptions import EmptyHistoryError, InvalidPredictorConfigError
from livecastlab.traces import REALLOCATION_SCHEDULE

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from livecastlab.traces import NetworkSample, NetworkTrace

logger = logging.getLogger(__name__)

BANDWIDTH_GRID = Grid(0.0, 15_000.0, 500.0)
LOSS_GRID = Grid(0.0, 1.0, 0.02)

MAX_HORIZON = 10
EWMA_SMOOTHING = 0.3


@dataclass(frozen=True)
class PredictionStep:
    bandwidth: Pmf
    loss: Pmf


class ScalarPrediction(NamedTuple):
    bandwidth_kbps: float
    loss_ratio: float


@dataclass(frozen=True)
class PredictorConfig:
    input_length: int = 180
    horizon: int = 5
    bandwidth_grid: Grid = BANDWIDTH_GRID
    loss_grid: Grid = LOSS_GRID
    schedule: tuple[int, ...] = field(default=tuple(sorted(REALLOCATION_SCHEDULE)))
    ewma_smoothing: float = EWMA_SMOOTHING

    def __post_init__(self):
        if self.input_length < 1:
            raise InvalidPredictorConfigError('input_length must be at least 1')
        if not 1 <= self.horizon <= MAX_HORIZON:
            raise InvalidPredictorConfigError(f'horizon must be within [1, {MAX_HORIZON}]')
        if not 0 < self.ewma_smoothing <= 1:
            raise InvalidPredictorConfigError('ewma_smoothing must be within (0, 1]')


class Predictor(ABC):
    name: ClassVar[str]

    def __init__(self, config: PredictorConfig | None = None):
        self.config = config or PredictorConfig()

    def _window(self, history: Sequence[NetworkSample]) -> list[NetworkSample]:
        if not history:
            raise EmptyHistoryError
        length = self.config.input_length
        window = list(history[-length:])
        if len(window) < length:
            logger.warning(
                'History holds %s of %s samples, padding with the first sample',
                len(window),
                length,
            )
            window = [window[0]] * (length - len(window)) + window
        return window

    def predict(
        self, history: Sequence[NetworkSample], horizon: int | None = None
    ) -> list[PredictionStep]:
        """Forecast the seconds following the last history sample."""
        window = self._window(history)
        return self._predict(window, window[-1].t + 1, horizon or self.config.horizon)

    @abstractmethod
    def _predict(
        self, window: list[NetworkSample], next_t: int, horizon: int
    ) -> list[PredictionStep]: ...


class ScalarPredictor(Predictor):
    """A single-point forecaster; its PMF output is the point-mass view of its scalars."""

    def predict_scalars(
        self, history: Sequence[NetworkSample], horizon: int | None = None
    ) -> list[ScalarPrediction]:
        window = self._window(history)
        return self._predict_scalars(window, window[-1].t + 1, horizon or self.config.horizon)

    def _predict(self, window, next_t, horizon):
        return as_point_mass(
            self._predict_scalars(window, next_t, horizon),
            bandwidth_grid=self.config.bandwidth_grid,
            loss_grid=self.config.loss_grid,
        )

    @abstractmethod
    def _predict_scalars(
        self, window: list[NetworkSample], next_t: int, horizon: int
    ) -> list[ScalarPrediction]: ...


class OraclePredictor(ScalarPredictor):
    """Knows the trace ahead of time; seconds past its end repeat the last sample."""

    name = 'oracle'

    def __init__(self, trace: NetworkTrace, config: PredictorConfig | None = None):
        super().__init__(config)
        self._by_t = {sample.t: sample for sample in trace}
        self._last = trace[-1]

    def _predict_scalars(self, window, next_t, horizon):
        future = [self._by_t.get(next_t + k, self._last) for k in range(horizon)]
        return [ScalarPrediction(s.bandwidth_kbps, s.loss_ratio) for s in future]


def ewma(values: np.ndarray, smoothing: float) -> float:
    """Exponentially weighted moving average seeded with the first value."""
    n = values.size
    decay = (1 - smoothing) ** np.arange(n - 1, -1, -1, dtype=np.float64)
    weights = smoothing * decay
    weights[0] = decay[0]
    return float(np.dot(weights, values))


class EwmaPredictor(ScalarPredictor):
    name = 'ewma'

    def _predict_scalars(self, window, next_t, horizon):
        smoothing = self.config.ewma_smoothing
        bandwidth = ewma(np.array([s.bandwidth_kbps for s in window]), smoothing)
        loss = ewma(np.array([s.loss_ratio for s in window]), smoothing)
        return [ScalarPrediction(bandwidth, loss)] * horizon


def as_point_mass(
    scalar_prediction: Iterable[tuple[float, float]],
    *,
    bandwidth_grid: Grid = BANDWIDTH_GRID,
    loss_grid: Grid = LOSS_GRID,
) -> list[PredictionStep]:
    """Turn per-step (bandwidth, loss) scalars into point-mass steps, clamping to the grids."""
    return [
        PredictionStep(
            bandwidth=Pmf.point_mass(bandwidth_grid, bandwidth),
            loss=Pmf.point_mass(loss_grid, loss),
        )
        for bandwidth, loss in scalar_prediction
    ]


def collapse_to_expectation(steps: Iterable[PredictionStep]) -> list[ScalarPrediction]:
    return [ScalarPrediction(pmf_expect(step.bandwidth), pmf_expect(step.loss)) for step in steps]


def crps(p: Pmf, actual: float) -> float:
    """Continuous ranked probability score of a discrete forecast against an observed value."""
    observed_cdf = (p.grid.values >= actual).astype(np.float64)
    return float(np.sum((p.cdf() - observed_cdf) ** 2) * p.grid.interval)


@dataclass(frozen=True)
class CrpsReport:
    bandwidth: float
    loss: float
    predictions: int


def evaluate_predictor(
    predictor: Predictor, trace: NetworkTrace, horizon: int = 1, *, start: int | None = None
) -> CrpsReport:
    """Mean CRPS of every step of rolling forecasts over a trace."""
    start = predictor.config.input_length if start is None else max(start, 1)
    samples = trace.samples
    bandwidth_scores = []
    loss_scores = []
    for index in range(start, len(samples) - horizon + 1):
        history = samples[max(0, index - predictor.config.input_length) : index]
        for offset, step in enumerate(predictor.predict(history, horizon)):
            actual = samples[index + offset]
            bandwidth_scores.append(crps(step.bandwidth, actual.bandwidth_kbps))
            loss_scores.append(crps(step.loss, actual.loss_ratio))
    return CrpsReport(
        bandwidth=float(np.mean(bandwidth_scores)) if bandwidth_scores else float('nan'),
        loss=float(np.mean(loss_scores)) if loss_scores else float('nan'),
        predictions=len(bandwidth_scores),
    )
