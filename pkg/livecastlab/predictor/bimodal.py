"""
Regime-conditional empirical forecaster.

Fits bandwidth and loss histograms separately for anomalous reallocation seconds and for
normal seconds, plus how often each kind of second turns anomalous. A forecast for a future
second mixes the two histograms with the anomaly probability of that second's kind.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import logging
from typing import TYPE_CHECKING, Any

import numpy as np

from livecastlab.distributions import Pmf, pmf_from_samples, pmf_mix
from livecastlab.predictor import PredictionStep, Predictor, PredictorConfig
from livecastlab.predictor.exceptions import UnlabeledTraceError
from livecastlab.traces import reallocation_feature

if TYPE_CHECKING:
    from pathlib import Path

    from livecastlab.traces import NetworkTrace

logger = logging.getLogger(__name__)

MIN_REGIME_SAMPLES = 30


@dataclass(frozen=True)
class BimodalModel:
    bandwidth_anomaly: Pmf
    bandwidth_normal: Pmf
    loss_anomaly: Pmf
    loss_normal: Pmf
    # Probability that a reallocation second, resp. any other second, is anomalous
    p_anomaly_reallocation: float
    p_anomaly_normal: float
    schedule: tuple[int, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            'bandwidth_anomaly': self.bandwidth_anomaly.to_dict(),
            'bandwidth_normal': self.bandwidth_normal.to_dict(),
            'loss_anomaly': self.loss_anomaly.to_dict(),
            'loss_normal': self.loss_normal.to_dict(),
            'p_anomaly_reallocation': self.p_anomaly_reallocation,
            'p_anomaly_normal': self.p_anomaly_normal,
            'schedule': list(self.schedule),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BimodalModel:
        return cls(
            bandwidth_anomaly=Pmf.from_dict(data['bandwidth_anomaly']),
            bandwidth_normal=Pmf.from_dict(data['bandwidth_normal']),
            loss_anomaly=Pmf.from_dict(data['loss_anomaly']),
            loss_normal=Pmf.from_dict(data['loss_normal']),
            p_anomaly_reallocation=float(data['p_anomaly_reallocation']),
            p_anomaly_normal=float(data['p_anomaly_normal']),
            schedule=tuple(data['schedule']),
        )

    def save(self, path: Path | str) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path: Path | str) -> BimodalModel:
        with open(path, encoding='utf-8') as f:
            return cls.from_dict(json.load(f))


def _regime_samples(values: np.ndarray, mask: np.ndarray, regime: str) -> np.ndarray:
    if mask.sum() >= MIN_REGIME_SAMPLES:
        return values[mask]
    logger.warning(
        'Only %s samples in the %s regime (need %s), falling back to the pooled histogram',
        int(mask.sum()),
        regime,
        MIN_REGIME_SAMPLES,
    )
    return values


def fit_bimodal(labeled_trace: NetworkTrace, config: PredictorConfig | None = None) -> BimodalModel:
    if not labeled_trace.labeled:
        raise UnlabeledTraceError
    config = config or PredictorConfig()

    reallocation = np.array([s.is_reallocation for s in labeled_trace], dtype=bool)
    anomaly = np.array([s.is_anomaly for s in labeled_trace], dtype=bool)
    bandwidth = labeled_trace.column('bandwidth_kbps')
    loss = labeled_trace.column('loss_ratio')

    anomalous = reallocation & anomaly
    normal = ~anomaly

    model = BimodalModel(
        bandwidth_anomaly=pmf_from_samples(
            _regime_samples(bandwidth, anomalous, 'anomaly'), config.bandwidth_grid
        ),
        bandwidth_normal=pmf_from_samples(
            _regime_samples(bandwidth, normal, 'normal'), config.bandwidth_grid
        ),
        loss_anomaly=pmf_from_samples(
            _regime_samples(loss, anomalous, 'anomaly'), config.loss_grid
        ),
        loss_normal=pmf_from_samples(_regime_samples(loss, normal, 'normal'), config.loss_grid),
        p_anomaly_reallocation=float(anomaly[reallocation].mean()) if reallocation.any() else 0.0,
        p_anomaly_normal=float(anomaly[~reallocation].mean()) if (~reallocation).any() else 0.0,
        schedule=config.schedule,
    )
    logger.info(
        'Fitted bimodal model: %.4f of reallocation seconds and %.4f of other seconds anomalous',
        model.p_anomaly_reallocation,
        model.p_anomaly_normal,
    )
    return model


class BimodalPredictor(Predictor):
    name = 'bimodal'

    def __init__(self, model: BimodalModel, config: PredictorConfig | None = None):
        super().__init__(config)
        self.model = model
        # The forecast depends only on the kind of second, so both are precomputed
        self._reallocation_step = self._mixture(model.p_anomaly_reallocation)
        self._normal_step = self._mixture(model.p_anomaly_normal)

    def _mixture(self, p_anomaly: float) -> PredictionStep:
        return PredictionStep(
            bandwidth=pmf_mix(self.model.bandwidth_anomaly, self.model.bandwidth_normal, p_anomaly),
            loss=pmf_mix(self.model.loss_anomaly, self.model.loss_normal, p_anomaly),
        )

    def _predict(self, window, next_t, horizon):
        markers = reallocation_feature(range(next_t, next_t + horizon), self.model.schedule)
        return [self._reallocation_step if marker else self._normal_step for marker in markers]
