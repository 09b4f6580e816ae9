"""Inputs of one seed, and the run of one controller on them."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
import logging
import time
from typing import TYPE_CHECKING

import numpy as np

from livecastlab.baselines import Controller, ControllerContext
from livecastlab.baselines.predictive import BarocController
from livecastlab.baselines.registry import BIMODAL_CONTROLLERS, build_controller
from livecastlab.crf_model import CrfBitrateModel
from livecastlab.predictor import EwmaPredictor, OraclePredictor
from livecastlab.predictor.bimodal import fit_bimodal
from livecastlab.simnet.experiment import run_experiment
from livecastlab.simnet.io import report_row
from livecastlab.traces import label_regimes
from livecastlab.traces.io import load_network_trace, load_video_trace
from livecastlab.traces.synthetic import gen_synthetic_trace, gen_synthetic_video, to_cbr

if TYPE_CHECKING:
    from livecastlab.harness.config import ExperimentConfig
    from livecastlab.predictor.bimodal import BimodalModel
    from livecastlab.scheduler import Decision
    from livecastlab.simnet import SecondReport
    from livecastlab.traces import NetworkTrace, VideoTrace

logger = logging.getLogger(__name__)

# Sub-seed purposes of a root seed
TRAINING_PURPOSE = 0
NETWORK_PURPOSE = 1
VIDEO_PURPOSE = 2


def derive_seed(seed: int, purpose: int) -> int:
    return int(np.random.SeedSequence([seed, purpose]).generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class SeedInputs:
    """Traces shared by every controller run with one seed."""

    config: ExperimentConfig
    seed: int

    @cached_property
    def training(self) -> NetworkTrace:
        config = self.config
        if config.training_trace is not None:
            trace = load_network_trace(config.training_trace)
        else:
            trace = gen_synthetic_trace(
                config.train_seconds,
                derive_seed(self.seed, TRAINING_PURPOSE),
                config.synthesis.regime,
            )
        return label_regimes(
            trace,
            config.synthesis.regime.schedule,
            config.synthesis.regime.anomaly_threshold,
        )

    @cached_property
    def network(self) -> NetworkTrace:
        config = self.config
        if config.network_trace is not None:
            return load_network_trace(config.network_trace)
        return gen_synthetic_trace(
            config.duration_s,
            derive_seed(self.seed, NETWORK_PURPOSE),
            config.synthesis.regime,
            start_t=self.training[-1].t + 1,
        )

    @cached_property
    def video(self) -> VideoTrace:
        config = self.config
        if config.video_trace is not None:
            return load_video_trace(config.video_trace)
        return gen_synthetic_video(
            len(self.network),
            derive_seed(self.seed, VIDEO_PURPOSE),
            config.synthesis.rd,
            start_t=self.network.start,
        )

    @cached_property
    def cbr_video(self) -> VideoTrace:
        return to_cbr(self.video, self.config.synthesis.cbr_psnr_penalty_db)

    @cached_property
    def bimodal_model(self) -> BimodalModel:
        return fit_bimodal(self.training, self.config.predictor_config)

    @property
    def warmup(self) -> tuple:
        return self.training.samples[-self.config.scheduler.input_length :]

    def context(self, controller: str) -> ControllerContext:
        return ControllerContext(
            predictor_config=self.config.predictor_config,
            qoe_weights=self.config.scheduler.qoe_weights,
            calibration=self.config.calibration,
            bimodal_model=self.bimodal_model if controller in BIMODAL_CONTROLLERS else None,
        )

    def controller(self, name: str) -> Controller:
        context = self.context(name)
        if name == BarocController.name and self.config.scheduler.predictor != 'bimodal':
            predictor_config = context.predictor_config
            if self.config.scheduler.predictor == 'oracle':
                predictor = OraclePredictor(self.network, predictor_config)
            else:
                predictor = EwmaPredictor(predictor_config)
            return BarocController(predictor, context.qoe_weights)
        return build_controller(name, context)


class TimedController(Controller):
    """Delegates to a controller and records the wall time of every decision."""

    def __init__(self, controller: Controller):
        self.controller = controller
        self.name = controller.name
        self.label = controller.label
        self.decision_times_ms: list[float] = []

    @classmethod
    def from_context(cls, context):
        raise TypeError('TimedController wraps an existing controller')

    def decide(self, t, history, crf_model, crf_prev) -> Decision:
        start = time.perf_counter()
        decision = self.controller.decide(t, history, crf_model, crf_prev)
        self.decision_times_ms.append((time.perf_counter() - start) * 1000)
        return decision

    def observe(self, report: SecondReport) -> None:
        self.controller.observe(report)


@dataclass(frozen=True)
class ControllerRun:
    controller: str
    seed: int
    rows: list[dict]
    decision_times_ms: list[float]

    def to_dict(self) -> dict:
        return {
            'controller': self.controller,
            'seed': self.seed,
            'rows': self.rows,
            'decision_times_ms': self.decision_times_ms,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ControllerRun:
        return cls(**data)


def run_controller(config: ExperimentConfig, name: str, seed: int) -> ControllerRun:
    inputs = SeedInputs(config, seed)
    controller = TimedController(inputs.controller(name))
    video = inputs.cbr_video if controller.controller.video_variant == 'cbr' else inputs.video

    logger.info('Running %s with seed %s over %s seconds', name, seed, len(inputs.network))
    reports = run_experiment(
        inputs.network,
        video,
        controller,
        seed,
        warmup=inputs.warmup,
        crf_model=CrfBitrateModel(),
        decode_policy=config.decode_policy,
    )
    return ControllerRun(
        controller=name,
        seed=seed,
        rows=[report_row(report) for report in reports],
        decision_times_ms=controller.decision_times_ms,
    )
