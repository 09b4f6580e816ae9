"""
Packet-level delivery of one second of video.

A second's frames are packetized, protected with ⌈α·u⌉ parity packets per frame, shed until
they fit the actual bandwidth, and sent through an independent per-packet loss channel. A frame
is recovered whenever at least as many of its packets arrive as it has data packets.

All randomness of a second is drawn from sub-seeds of (root seed, second, stream), never from
a shared generator, so two runs differing only in their decisions face the same channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import takewhile
import math
from typing import TYPE_CHECKING, Literal

from more_itertools import ilen
import numpy as np

from livecastlab.scheduler import MTU_BITS, Decision
from livecastlab.scheduler.convolution import parity_packets
from livecastlab.simnet.exceptions import UnknownDecodePolicyError
from livecastlab.traces import I_FRAME, MAX_FRAME_RATE, P_FRAME

if TYPE_CHECKING:
    from collections.abc import Sequence

    from livecastlab.traces import CrfRecord

DecodePolicy = Literal['independent', 'cascade']
DECODE_POLICIES: tuple[str, ...] = ('independent', 'cascade')

# Sub-seed streams
TRIM_STREAM = 0
SHED_STREAM = 1
LOSS_STREAM = 2

# Loss draws per frame held in the per-second matrix; longer frames draw overflow slots
LOSS_SLOTS = 512


def stream_rng(seed: int, t: int, stream: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, t, stream, *extra]))


@dataclass(frozen=True)
class FramePackets:
    index: int
    frame_type: str
    data_packets: int
    parity_packets: int

    @property
    def total_packets(self) -> int:
        return self.data_packets + self.parity_packets


@dataclass(frozen=True)
class FrameOutcome:
    frame: FramePackets
    lost_data: int
    lost_parity: int

    @property
    def lost(self) -> int:
        return self.lost_data + self.lost_parity

    @property
    def delivered(self) -> bool:
        return self.frame.total_packets - self.lost >= self.frame.data_packets


@dataclass(frozen=True)
class SecondReport:
    t: int
    decision: Decision
    bitrate_kbps: float
    sent_data: int
    sent_parity: int
    lost: int
    recovered: int
    frames_offered: int
    frames_delivered: int
    psnr_db: float
    stall: bool

    @property
    def recovery_ratio(self) -> float:
        return self.recovered / self.lost if self.lost else 1.0

    @property
    def parity_utility(self) -> float:
        return self.recovered / self.sent_parity if self.sent_parity else 0.0

    @property
    def loss_ratio(self) -> float:
        sent = self.sent_data + self.sent_parity
        return self.lost / sent if sent else 0.0


def packetize(frame_size_bits: int, mtu_bits: int = MTU_BITS) -> int:
    return math.ceil(frame_size_bits / mtu_bits) if frame_size_bits > 0 else 0


def build_frames(
    record: CrfRecord, fec_ratio: float, mtu_bits: int = MTU_BITS
) -> list[FramePackets]:
    """Packetize every non-empty frame of a second and attach its parity."""
    frames = []
    for index, (size, frame_type) in enumerate(
        zip(record.frame_sizes_bits, record.frame_types, strict=True)
    ):
        data = packetize(size, mtu_bits)
        if data:
            frames.append(FramePackets(index, frame_type, data, parity_packets(fec_ratio, data)))
    return frames


def trim_frame_rate(
    frames: Sequence[FramePackets], frame_rate: int, rng: np.random.Generator
) -> list[FramePackets]:
    """Keep the I-frame plus a uniformly random choice of P-frames, γ frames in total."""
    if frame_rate >= len(frames):
        return list(frames)
    if frame_rate <= 0:
        return []
    i_frames = [frame for frame in frames if frame.frame_type == I_FRAME]
    p_frames = [frame for frame in frames if frame.frame_type == P_FRAME]
    kept = max(frame_rate - len(i_frames), 0)
    chosen = rng.choice(len(p_frames), size=kept, replace=False)
    retained = i_frames[:frame_rate] + [p_frames[i] for i in chosen]
    return sorted(retained, key=lambda frame: frame.index)


def shed_frames(
    frames: Sequence[FramePackets],
    bandwidth_kbps: float,
    rng: np.random.Generator,
    mtu_bits: int = MTU_BITS,
) -> list[FramePackets]:
    """
    Drop random P-frames until data and parity fit the bandwidth of the second.

    I-frames are only dropped once no P-frame is left.
    """
    retained = list(frames)
    budget_bits = bandwidth_kbps * 1000
    total_packets = sum(frame.total_packets for frame in retained)
    while retained and total_packets * mtu_bits > budget_bits:
        p_positions = [i for i, frame in enumerate(retained) if frame.frame_type == P_FRAME]
        if p_positions:
            position = p_positions[int(rng.integers(len(p_positions)))]
        else:
            position = 0
        total_packets -= retained.pop(position).total_packets
    return retained


class LossDraws:
    """Uniform draws of one second, addressed by (frame index, packet slot)."""

    def __init__(self, seed: int, t: int, frames: int = MAX_FRAME_RATE, slots: int = LOSS_SLOTS):
        self.seed = seed
        self.t = t
        self.frames = frames
        self.slots = slots

    @cached_property
    def _matrix(self) -> np.ndarray:
        return stream_rng(self.seed, self.t, LOSS_STREAM).random((self.frames, self.slots))

    def for_frame(self, index: int, packets: int) -> np.ndarray:
        draws = self._matrix[index, : min(packets, self.slots)]
        if packets <= self.slots:
            return draws
        overflow = stream_rng(self.seed, self.t, LOSS_STREAM, index).random(packets - self.slots)
        return np.concatenate([draws, overflow])


def transmit_and_recover(
    frames: Sequence[FramePackets], loss_ratio: float, draws: LossDraws
) -> list[FrameOutcome]:
    """
    Send each frame's data packets in slots 0..u−1 and its parity in slots u..u+p−1.

    A packet is lost when its draw falls below the loss ratio of the second. Lossless seconds
    never touch the draws.
    """
    if loss_ratio <= 0:
        return [FrameOutcome(frame=frame, lost_data=0, lost_parity=0) for frame in frames]
    outcomes = []
    for frame in frames:
        lost = draws.for_frame(frame.index, frame.total_packets) < loss_ratio
        outcomes.append(
            FrameOutcome(
                frame=frame,
                lost_data=int(lost[: frame.data_packets].sum()),
                lost_parity=int(lost[frame.data_packets :].sum()),
            )
        )
    return outcomes


def decode_accounting(
    delivered: Sequence[bool],
    frame_types: Sequence[str],
    policy: DecodePolicy = 'independent',
) -> int:
    """
    Count decodable frames of a second.

    Nothing decodes without the I-frame. Under `independent` every other delivered frame then
    counts; under `cascade` decoding stops at the first missing frame.
    """
    if policy not in DECODE_POLICIES:
        raise UnknownDecodePolicyError(policy)
    if not delivered or frame_types[0] != I_FRAME or not delivered[0]:
        return 0
    if policy == 'independent':
        return sum(delivered)
    return ilen(takewhile(bool, delivered))
