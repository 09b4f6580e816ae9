"""
Joint scheduling of video quality, frame rate and FEC ratio under uncertain network conditions.

The scheduler never sees scalar forecasts: bandwidth and loss arrive as PMFs and every quantity
derived from them (FEC ratio, frame rate, bitrate left for media) stays a distribution until a
CRF is chosen against the learned CRF-to-bitrate model.
"""

from __future__ import annotations

from dataclasses import dataclass

from livecastlab.distributions import Grid
from livecastlab.scheduler.exceptions import InvalidDecisionError, InvalidQoeWeightsError
from livecastlab.traces import CRF_SET, MAX_FRAME_RATE

# Packet payload in kbit; bandwidth is in kbps so γ frames cost γ·MTU_KBIT kbps of headers
MTU_KBIT = 12
MTU_BITS = 12_000
MAX_FEC_RATIO = 2.0
FEC_RATIO_GRID = Grid(0.0, MAX_FEC_RATIO, 0.01)
FRAME_RATE_GRID = Grid(0.0, float(MAX_FRAME_RATE), 1.0)
MAX_CRF = max(CRF_SET)


@dataclass(frozen=True)
class Decision:
    crf: int
    frame_rate: int
    fec_ratio: float
    predicted_bitrate_kbps: float = 0.0

    def __post_init__(self):
        if self.crf not in CRF_SET:
            raise InvalidDecisionError(f'CRF {self.crf} is not one of {CRF_SET}')
        if not 0 <= self.frame_rate <= MAX_FRAME_RATE:
            raise InvalidDecisionError(
                f'Frame rate {self.frame_rate} outside [0, {MAX_FRAME_RATE}]'
            )
        if not self.fec_ratio >= 0:
            raise InvalidDecisionError(f'FEC ratio must be non-negative, got {self.fec_ratio}')

    @classmethod
    def cold_start(cls) -> Decision:
        """Most conservative quality at full frame rate, without parity."""
        return cls(crf=MAX_CRF, frame_rate=MAX_FRAME_RATE, fec_ratio=0.0)

    def to_dict(self) -> dict[str, float]:
        return {
            'crf': self.crf,
            'frame_rate': self.frame_rate,
            'fec_ratio': self.fec_ratio,
            'predicted_bitrate_kbps': self.predicted_bitrate_kbps,
        }


@dataclass(frozen=True)
class QoeWeights:
    frame_rate: float = 1.0
    quality: float = 1.0
    smoothness: float = 0.5

    def __post_init__(self):
        for name in ('frame_rate', 'quality', 'smoothness'):
            if not 0 <= getattr(self, name) <= 1:
                raise InvalidQoeWeightsError(f'QoE weight {name} must lie in [0, 1]')


@dataclass(frozen=True)
class BitrateAtom:
    bitrate_kbps: float
    probability: float
    # Provenance, kept so a chosen atom can be traced back to its (w, γ, α) combination
    bandwidth_kbps: float
    frame_rate: int
    fec_ratio: float

    @property
    def feasible(self) -> bool:
        return self.bitrate_kbps > 0
