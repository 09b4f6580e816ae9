"""
Loss-driven state machine in the style of FBRA.

The controller reacts to the loss it observed in the previous second. A run of lossy seconds
drops it to DOWN (lowest quality, fixed parity); clean seconds lead through PROBE back to STAY,
and a long clean stretch in STAY steps quality up one level when the last bandwidth allows it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import enum
from typing import TYPE_CHECKING

from livecastlab.baselines import Controller, FbraCalibration
from livecastlab.scheduler import MAX_CRF, Decision
from livecastlab.traces import CRF_SET, MAX_FRAME_RATE

if TYPE_CHECKING:
    from livecastlab.crf_model import CrfBitrateModel
    from livecastlab.traces import NetworkSample


class FbraState(enum.Enum):
    UP = 'UP'
    STAY = 'STAY'
    DOWN = 'DOWN'
    PROBE = 'PROBE'


@dataclass(frozen=True)
class FbraStatus:
    state: FbraState
    crf: int
    lossy_run: int = 0
    clean_run: int = 0


def _better(crf: int) -> int:
    index = CRF_SET.index(crf)
    return CRF_SET[max(index - 1, 0)]


def fbra_step(
    status: FbraStatus,
    sample: NetworkSample,
    crf_model: CrfBitrateModel,
    calibration: FbraCalibration,
) -> FbraStatus:
    """Advance the state machine by one observed second."""
    lossy = sample.loss_ratio > calibration.loss_threshold
    status = replace(
        status,
        lossy_run=status.lossy_run + 1 if lossy else 0,
        clean_run=0 if lossy else status.clean_run + 1,
    )

    if status.state is FbraState.DOWN:
        if status.clean_run >= calibration.probe_after_clean_s:
            return replace(status, state=FbraState.PROBE, crf=_better(MAX_CRF), clean_run=0)
        return status

    if lossy:
        if status.lossy_run >= calibration.down_after_lossy_s:
            return replace(status, state=FbraState.DOWN, crf=MAX_CRF, clean_run=0)
        if status.state is FbraState.PROBE:
            return replace(status, state=FbraState.DOWN, crf=MAX_CRF, clean_run=0)
        return replace(status, state=FbraState.STAY)

    if status.state is FbraState.PROBE:
        if status.clean_run >= calibration.probe_length_s:
            return replace(status, state=FbraState.STAY, clean_run=0)
        return status

    # STAY, or the second after an UP step
    if status.clean_run >= calibration.up_after_clean_s:
        better = _better(status.crf)
        cost = crf_model.expected_bitrate(better) * (1 + calibration.stay_fec_ratio)
        if better != status.crf and cost <= sample.bandwidth_kbps:
            return replace(status, state=FbraState.UP, crf=better, clean_run=0)
    return replace(status, state=FbraState.STAY)


def fbra_decision(status: FbraStatus, calibration: FbraCalibration) -> Decision:
    fec_ratio = (
        calibration.down_fec_ratio if status.state is FbraState.DOWN else calibration.stay_fec_ratio
    )
    return Decision(crf=status.crf, frame_rate=MAX_FRAME_RATE, fec_ratio=fec_ratio)


class FbraController(Controller):
    name = 'fbra'
    label = 'FBRA-like'

    def __init__(self, calibration: FbraCalibration | None = None):
        self.calibration = calibration or FbraCalibration()
        self.status = FbraStatus(state=FbraState.STAY, crf=self.calibration.initial_crf)
        self._last_t: int | None = None

    @classmethod
    def from_context(cls, context):
        return cls(context.calibration.fbra)

    def decide(self, t, history, crf_model, crf_prev):
        if history and history[-1].t != self._last_t:
            self._last_t = history[-1].t
            self.status = fbra_step(self.status, history[-1], crf_model, self.calibration)
        return fbra_decision(self.status, self.calibration)
