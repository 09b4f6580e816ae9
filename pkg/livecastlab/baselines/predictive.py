"""Distribution-scheduling controllers: the full stack and its single-point ablations."""

from __future__ import annotations

from typing import TYPE_CHECKING

from livecastlab.baselines import Controller, ControllerContext
from livecastlab.baselines.exceptions import MissingBimodalModelError
from livecastlab.predictor import (
    EwmaPredictor,
    Predictor,
    as_point_mass,
    collapse_to_expectation,
)
from livecastlab.predictor.bimodal import BimodalPredictor
from livecastlab.scheduler import Decision, QoeWeights
from livecastlab.scheduler.horizon import solve_horizon

if TYPE_CHECKING:
    from livecastlab.predictor import PredictionStep


class PredictiveController(Controller):
    """Plans over the predicted horizon and sends the first planned second."""

    def __init__(self, predictor: Predictor, weights: QoeWeights | None = None):
        self.predictor = predictor
        self.weights = weights or QoeWeights()

    def predictions(self, history) -> list[PredictionStep]:
        return self.predictor.predict(history)

    def decide(self, t, history, crf_model, crf_prev):
        if not history:
            return Decision.cold_start()
        return solve_horizon(self.predictions(history), crf_model, crf_prev, self.weights)


def _bimodal_predictor(context: ControllerContext) -> BimodalPredictor:
    if context.bimodal_model is None:
        raise MissingBimodalModelError
    return BimodalPredictor(context.bimodal_model, context.predictor_config)


class BarocController(PredictiveController):
    name = 'baroc'
    label = 'BAROC'

    @classmethod
    def from_context(cls, context):
        return cls(_bimodal_predictor(context), context.qoe_weights)


class InformerVbrController(PredictiveController):
    """Point-mass forecasts from a single-point predictor, on VBR video."""

    name = 'informer-vbr'
    label = 'Informer-VBR'

    @classmethod
    def from_context(cls, context):
        return cls(EwmaPredictor(context.predictor_config), context.qoe_weights)


class MtpCbrController(PredictiveController):
    """Bimodal forecasts collapsed to their expectation, on CBR video."""

    name = 'mtp-cbr'
    label = 'MTP-Informer-CBR'
    video_variant = 'cbr'

    @classmethod
    def from_context(cls, context):
        return cls(_bimodal_predictor(context), context.qoe_weights)

    def predictions(self, history):
        config = self.predictor.config
        return as_point_mass(
            collapse_to_expectation(self.predictor.predict(history)),
            bandwidth_grid=config.bandwidth_grid,
            loss_grid=config.loss_grid,
        )


class InformerCbrController(InformerVbrController):
    name = 'informer-cbr'
    label = 'Informer-CBR'
    video_variant = 'cbr'
