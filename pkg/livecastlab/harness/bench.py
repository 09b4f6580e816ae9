"""Wall time of single decisions of the model-based controllers, per planning horizon."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
import logging
import time
from typing import TYPE_CHECKING

import numpy as np
from tqdm import tqdm

from livecastlab.baselines import ControllerContext
from livecastlab.baselines.registry import (
    BIMODAL_CONTROLLERS,
    MODEL_BASED_CONTROLLERS,
    build_controller,
)
from livecastlab.crf_model import WINDOW_S, CrfBitrateModel
from livecastlab.harness.experiment import SeedInputs
from livecastlab.scheduler import MAX_CRF

if TYPE_CHECKING:
    from livecastlab.harness.config import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecisionTiming:
    controller: str
    horizon: int
    calls: int
    median_ms: float
    std_ms: float

    def to_dict(self) -> dict:
        return asdict(self)


def _warm_crf_model(inputs: SeedInputs) -> CrfBitrateModel:
    """A CRF model that has seen every CRF for a full window, so all CRFs use fitted mixtures."""
    model = CrfBitrateModel()
    for second in inputs.video.seconds[:WINDOW_S]:
        for crf in model.crfs:
            model.observe(crf, second[crf].bitrate_kbps, second.t)
    return model


def cmd_bench_decision(
    config: ExperimentConfig,
    *,
    calls: int | None = None,
    horizons: tuple[int, ...] | None = None,
    controllers: tuple[str, ...] = MODEL_BASED_CONTROLLERS,
) -> list[DecisionTiming]:
    """
    Time `calls` decisions per (controller, horizon).

    Decisions are made along the first seed's traces: each call sees the history up to a
    different second, so the timed predictions are the ones a run would produce.
    """
    calls = calls or config.bench.calls
    horizons = horizons or config.bench.horizons
    inputs = SeedInputs(config, config.seeds[0])
    history = list(inputs.training.samples) + list(inputs.network.samples)
    first = len(inputs.training)
    crf_model = _warm_crf_model(inputs)

    timings = []
    for name in controllers:
        for horizon in horizons:
            context = ControllerContext(
                predictor_config=replace(config.predictor_config, horizon=horizon),
                qoe_weights=config.scheduler.qoe_weights,
                calibration=config.calibration,
                bimodal_model=inputs.bimodal_model if name in BIMODAL_CONTROLLERS else None,
            )
            controller = build_controller(name, context)
            samples_ms = np.empty(calls)
            for call in tqdm(range(calls), desc=f'{name} η={horizon}', leave=False):
                index = first + call % len(inputs.network)
                seen = history[:index]
                start = time.perf_counter()
                controller.decide(history[index].t, seen, crf_model, MAX_CRF)
                samples_ms[call] = (time.perf_counter() - start) * 1000
            timing = DecisionTiming(
                controller=name,
                horizon=horizon,
                calls=calls,
                median_ms=float(np.median(samples_ms)),
                std_ms=float(np.std(samples_ms)),
            )
            logger.info(
                '%s at horizon %s: median %.3f ms, std %.3f ms',
                name,
                horizon,
                timing.median_ms,
                timing.std_ms,
            )
            timings.append(timing)
    return timings
