"""
Controllers that drive the simulator.

Every controller answers the same question each second: given the network samples observed so
far, the CRF-to-bitrate model and the previous CRF, which (CRF, frame rate, FEC ratio) to send.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, ClassVar, Literal

from livecastlab.predictor import PredictorConfig
from livecastlab.scheduler import MAX_FEC_RATIO, QoeWeights

if TYPE_CHECKING:
    from collections.abc import Sequence

    from livecastlab.crf_model import CrfBitrateModel
    from livecastlab.predictor.bimodal import BimodalModel
    from livecastlab.scheduler import Decision
    from livecastlab.simnet import SecondReport
    from livecastlab.traces import NetworkSample

VideoVariant = Literal['vbr', 'cbr']


@dataclass(frozen=True)
class FbraCalibration:
    loss_threshold: float = 0.02
    down_after_lossy_s: int = 3
    up_after_clean_s: int = 10
    probe_after_clean_s: int = 5
    probe_length_s: int = 3
    down_fec_ratio: float = 0.1
    stay_fec_ratio: float = 0.05
    initial_crf: int = 41


@dataclass(frozen=True)
class BaselineCalibration:
    fbra: FbraCalibration = field(default_factory=FbraCalibration)
    rfec_media_share: float = 0.5
    max_fec_ratio: float = MAX_FEC_RATIO

    @classmethod
    def from_dict(cls, data: dict) -> BaselineCalibration:
        data = dict(data)
        fbra = FbraCalibration(**data.pop('fbra', {}))
        return cls(fbra=fbra, **data)


@dataclass(frozen=True)
class ControllerContext:
    """Everything a controller may be built from."""

    predictor_config: PredictorConfig = field(default_factory=PredictorConfig)
    qoe_weights: QoeWeights = field(default_factory=QoeWeights)
    calibration: BaselineCalibration = field(default_factory=BaselineCalibration)
    bimodal_model: BimodalModel | None = None


class Controller(ABC):
    name: ClassVar[str]
    # Human-readable name used in reports
    label: ClassVar[str]
    video_variant: ClassVar[VideoVariant] = 'vbr'

    @classmethod
    @abstractmethod
    def from_context(cls, context: ControllerContext) -> Controller: ...

    @abstractmethod
    def decide(
        self,
        t: int,
        history: Sequence[NetworkSample],
        crf_model: CrfBitrateModel,
        crf_prev: int,
    ) -> Decision:
        """Decide second `t` from the samples strictly before it."""

    def observe(self, report: SecondReport) -> None:  # noqa: B027
        pass
