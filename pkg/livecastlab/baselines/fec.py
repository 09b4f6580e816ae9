"""Point-estimate FEC controllers in the style of R-FEC and LightFEC."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from livecastlab.baselines import Controller
from livecastlab.predictor import EwmaPredictor, PredictorConfig, ScalarPrediction
from livecastlab.scheduler import MAX_CRF, MAX_FEC_RATIO, MTU_KBIT, Decision
from livecastlab.scheduler.convolution import min_fec_ratio
from livecastlab.traces import MAX_FRAME_RATE

if TYPE_CHECKING:
    from collections.abc import Callable

    from livecastlab.crf_model import CrfBitrateModel


def _best_fitting_crf(crf_model: CrfBitrateModel, fits: Callable[[float], bool]) -> int:
    """The CRF with the highest expected bitrate that still fits, else the lowest quality."""
    fitting = [crf for crf in crf_model.crfs if fits(crf_model.expected_bitrate(crf))]
    if not fitting:
        return MAX_CRF
    return max(fitting, key=crf_model.expected_bitrate)


def rfec_like_decide(
    estimate: ScalarPrediction,
    crf_model: CrfBitrateModel,
    *,
    media_share: float = 0.5,
    max_fec_ratio: float = MAX_FEC_RATIO,
) -> Decision:
    """Put half the predicted bandwidth into media and fill the rest with parity."""
    bandwidth = estimate.bandwidth_kbps
    crf = _best_fitting_crf(crf_model, lambda bitrate: bitrate <= media_share * bandwidth)
    bitrate = crf_model.expected_bitrate(crf)
    residual = bandwidth - bitrate - MAX_FRAME_RATE * MTU_KBIT
    fec_ratio = float(np.clip(residual / bitrate, 0.0, max_fec_ratio))
    return Decision(
        crf=crf, frame_rate=MAX_FRAME_RATE, fec_ratio=fec_ratio, predicted_bitrate_kbps=bitrate
    )


def lightfec_like_decide(
    estimate: ScalarPrediction,
    crf_model: CrfBitrateModel,
    *,
    max_fec_ratio: float = MAX_FEC_RATIO,
) -> Decision:
    """Cover the predicted loss exactly, then pick the best quality that fits with its parity."""
    if estimate.loss_ratio >= 1:
        fec_ratio = max_fec_ratio
    else:
        fec_ratio = min(min_fec_ratio(estimate.loss_ratio), max_fec_ratio)
    crf = _best_fitting_crf(
        crf_model, lambda bitrate: (1 + fec_ratio) * bitrate <= estimate.bandwidth_kbps
    )
    return Decision(
        crf=crf,
        frame_rate=MAX_FRAME_RATE,
        fec_ratio=fec_ratio,
        predicted_bitrate_kbps=crf_model.expected_bitrate(crf),
    )


class _EwmaController(Controller):
    def __init__(self, config: PredictorConfig | None = None, max_fec_ratio=MAX_FEC_RATIO):
        self.predictor = EwmaPredictor(config)
        self.max_fec_ratio = max_fec_ratio

    def estimate(self, history) -> ScalarPrediction:
        return self.predictor.predict_scalars(history, 1)[0]


class RfecController(_EwmaController):
    name = 'rfec'
    label = 'R-FEC-like'

    def __init__(self, config=None, max_fec_ratio=MAX_FEC_RATIO, media_share: float = 0.5):
        super().__init__(config, max_fec_ratio)
        self.media_share = media_share

    @classmethod
    def from_context(cls, context):
        return cls(
            context.predictor_config,
            context.calibration.max_fec_ratio,
            context.calibration.rfec_media_share,
        )

    def decide(self, t, history, crf_model, crf_prev):
        if not history:
            return Decision.cold_start()
        return rfec_like_decide(
            self.estimate(history),
            crf_model,
            media_share=self.media_share,
            max_fec_ratio=self.max_fec_ratio,
        )


class LightFecController(_EwmaController):
    name = 'lightfec'
    label = 'LightFEC-like (EWMA in place of LSTM)'

    @classmethod
    def from_context(cls, context):
        return cls(context.predictor_config, context.calibration.max_fec_ratio)

    def decide(self, t, history, crf_model, crf_prev):
        if not history:
            return Decision.cold_start()
        return lightfec_like_decide(
            self.estimate(history), crf_model, max_fec_ratio=self.max_fec_ratio
        )
