"""
Seeded synthetic network and video traces.

Network seconds are either normal or anomalous. Anomalies are injected at reallocation seconds
with one probability and at other seconds with another, and anomalous seconds draw bandwidth,
loss and latency from a degraded regime. Video seconds come from a scene-driven
rate-distortion model with one GOP per second.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
import logging
import math

import numpy as np

from livecastlab.traces import (
    ANOMALY_THRESHOLD,
    CRF_SET,
    MAX_FRAME_RATE,
    REALLOCATION_SCHEDULE,
    CrfRecord,
    NetworkSample,
    NetworkTrace,
    VideoSecond,
    VideoTrace,
)
from livecastlab.traces.exceptions import InvalidRegimeParamsError

logger = logging.getLogger(__name__)

I_FRAME_WEIGHT = 4.0


@dataclass(frozen=True)
class RegimeParams:
    bandwidth_mean_kbps: float = 10_000.0
    # Shape of the log-normal bandwidth distribution
    bandwidth_sigma: float = 0.25
    # Mean loss ratio of normal seconds; loss is zero with probability 1 - loss_event_probability
    loss_mean: float = 0.002
    loss_event_probability: float = 0.5
    latency_mean_ms: float = 40.0
    latency_sigma: float = 0.2

    p_anomaly_reallocation: float = 0.3073
    p_anomaly_normal: float = 0.0432

    # Degradation of anomalous seconds relative to normal ones
    bandwidth_scale: float = 0.76
    loss_scale: float = 16.0
    latency_scale: float = 4.49

    anomaly_threshold: float = ANOMALY_THRESHOLD
    schedule: tuple[int, ...] = tuple(sorted(REALLOCATION_SCHEDULE))

    def __post_init__(self):
        for field_ in fields(self):
            value = getattr(self, field_.name)
            if isinstance(value, int | float) and not isinstance(value, bool) and value < 0:
                raise InvalidRegimeParamsError(f'{field_.name} must be non-negative, got {value}')
        for name in ('p_anomaly_reallocation', 'p_anomaly_normal', 'loss_event_probability'):
            if getattr(self, name) > 1:
                raise InvalidRegimeParamsError(f'{name} must be a probability')
        if self.bandwidth_mean_kbps <= 0 or self.latency_mean_ms <= 0:
            raise InvalidRegimeParamsError('Bandwidth and latency means must be positive')

    @property
    def anomalous_loss_mean(self) -> float:
        return self.loss_mean * self.loss_scale

    @classmethod
    def from_dict(cls, data: dict) -> RegimeParams:
        data = dict(data)
        if 'schedule' in data:
            data['schedule'] = tuple(sorted(data['schedule']))
        try:
            return cls(**data)
        except TypeError as e:
            raise InvalidRegimeParamsError(str(e)) from e


@dataclass(frozen=True)
class RdParams:
    # Bitrate of the lowest CRF in an average scene
    base_bitrate_kbps: float = 8_000.0
    # Bitrate halves every `halving_crf_step` CRF units
    halving_crf_step: float = 6.0
    psnr_intercept_db: float = 60.0
    psnr_slope_db: float = 0.6
    psnr_noise_db: float = 0.5

    # Two scene types (calm, action) with their bitrate multipliers
    scene_factors: tuple[float, float] = (0.8, 1.5)
    p_action_scene: float = 0.35
    mean_scene_length_s: float = 20.0
    # Per-second log-normal jitter of the scene multiplier, and of P-frame sizes
    bitrate_sigma: float = 0.15
    frame_sigma: float = 0.2

    crfs: tuple[int, ...] = CRF_SET
    frame_rate: int = MAX_FRAME_RATE

    @classmethod
    def from_dict(cls, data: dict) -> RdParams:
        data = dict(data)
        for key in ('scene_factors', 'crfs'):
            if key in data:
                data[key] = tuple(data[key])
        return cls(**data)


def _lognormal(rng: np.random.Generator, mean: np.ndarray | float, sigma: float, size: int):
    # Parameterized by the distribution mean rather than the underlying normal's mean
    mu = np.log(mean) - sigma**2 / 2
    return rng.lognormal(mean=mu, sigma=sigma, size=size)


def gen_synthetic_trace(
    duration_s: int, seed: int, params: RegimeParams | None = None, *, start_t: int = 0
) -> NetworkTrace:
    if duration_s < 1:
        raise InvalidRegimeParamsError('Trace duration must be at least one second')
    params = params or RegimeParams()
    rng = np.random.default_rng(seed)

    ts = np.arange(start_t, start_t + duration_s)
    schedule = np.array(params.schedule)
    reallocation = np.isin(ts % 60, schedule)
    p_anomaly = np.where(reallocation, params.p_anomaly_reallocation, params.p_anomaly_normal)
    anomalous = rng.random(duration_s) < p_anomaly

    bandwidth_mean = np.where(
        anomalous, params.bandwidth_mean_kbps * params.bandwidth_scale, params.bandwidth_mean_kbps
    )
    bandwidth = _lognormal(rng, bandwidth_mean, params.bandwidth_sigma, duration_s)

    # Normal loss: zero unless a loss event happens, then exponential with the matching mean.
    # Anomalous loss: the threshold plus an exponential excess when the anomalous mean exceeds
    # the threshold, so every injected anomaly crosses it; a plain exponential otherwise. Either
    # way the regime mean is loss_mean * loss_scale, and loss_mean = 0 means no loss at all.
    event = rng.random(duration_s) < params.loss_event_probability
    normal_event_mean = (
        params.loss_mean / params.loss_event_probability if params.loss_event_probability else 0.0
    )
    normal_loss = np.where(event, normal_event_mean * rng.standard_exponential(duration_s), 0.0)
    excess = rng.standard_exponential(duration_s)
    if params.anomalous_loss_mean > params.anomaly_threshold:
        excess_mean = params.anomalous_loss_mean - params.anomaly_threshold
        anomalous_loss = params.anomaly_threshold + excess_mean * excess
    else:
        anomalous_loss = params.anomalous_loss_mean * excess
    loss = np.clip(np.where(anomalous, anomalous_loss, normal_loss), 0.0, 1.0)

    latency_mean = np.where(
        anomalous, params.latency_mean_ms * params.latency_scale, params.latency_mean_ms
    )
    latency = _lognormal(rng, latency_mean, params.latency_sigma, duration_s)

    samples = tuple(
        NetworkSample(
            t=int(t),
            bandwidth_kbps=float(b),
            loss_ratio=float(l_),
            latency_ms=float(lat),
        )
        for t, b, l_, lat in zip(ts, bandwidth, loss, latency, strict=True)
    )
    logger.debug(
        'Generated %s seconds of network trace, %s anomalous', duration_s, int(anomalous.sum())
    )
    return NetworkTrace(samples=samples, injected_anomalies=tuple(bool(a) for a in anomalous))


def _scene_multipliers(rng: np.random.Generator, duration_s: int, rd: RdParams) -> np.ndarray:
    multipliers = np.empty(duration_s)
    t = 0
    while t < duration_s:
        length = int(rng.geometric(1 / rd.mean_scene_length_s))
        action = rng.random() < rd.p_action_scene
        multipliers[t : t + length] = rd.scene_factors[1 if action else 0]
        t += length
    return multipliers * _lognormal(rng, 1.0, rd.bitrate_sigma, duration_s)


def _frame_sizes(rng: np.random.Generator, bitrate_kbps: float, frame_rate: int, sigma: float):
    """Split one second of video bits into an I-frame and P-frames summing to the bitrate."""
    weights = np.empty(frame_rate)
    weights[0] = I_FRAME_WEIGHT
    weights[1:] = _lognormal(rng, 1.0, sigma, frame_rate - 1)
    total_bits = round(bitrate_kbps * 1000)
    sizes = np.floor(total_bits * weights / weights.sum()).astype(np.int64)
    # The rounding remainder goes to the I-frame so the sizes sum exactly to the bitrate
    sizes[0] += total_bits - sizes.sum()
    return tuple(int(size) for size in sizes)


def gen_synthetic_video(
    duration_s: int, seed: int, rd_model: RdParams | None = None, *, start_t: int = 0
) -> VideoTrace:
    if duration_s < 1:
        raise InvalidRegimeParamsError('Trace duration must be at least one second')
    rd = rd_model or RdParams()
    rng = np.random.default_rng(seed)
    multipliers = _scene_multipliers(rng, duration_s, rd)
    psnr_noise = rng.normal(0.0, rd.psnr_noise_db, duration_s)

    seconds = []
    for offset in range(duration_s):
        records = {}
        for crf in rd.crfs:
            bitrate = (
                rd.base_bitrate_kbps
                * math.pow(2.0, -(crf - rd.crfs[0]) / rd.halving_crf_step)
                * multipliers[offset]
            )
            records[crf] = CrfRecord(
                bitrate_kbps=bitrate,
                # Noise is shared across CRFs of a second, so PSNR stays monotone in CRF
                psnr_db=float(rd.psnr_intercept_db - rd.psnr_slope_db * crf + psnr_noise[offset]),
                frame_sizes_bits=_frame_sizes(rng, bitrate, rd.frame_rate, rd.frame_sigma),
            )
        seconds.append(VideoSecond(t=start_t + offset, records=records))
    return VideoTrace(seconds=tuple(seconds))


def to_cbr(video: VideoTrace, psnr_penalty_db: float = 2.35) -> VideoTrace:
    """
    Derive a constant-bitrate variant of a VBR trace.

    Each CRF's bitrate becomes its mean over the trace, frame sizes are rescaled to that
    constant, and PSNR drops by the given penalty.
    """
    means = {
        crf: float(np.mean([second[crf].bitrate_kbps for second in video])) for crf in video.crfs
    }
    seconds = []
    for second in video:
        records = {}
        for crf, record in second.records.items():
            sizes = np.asarray(record.frame_sizes_bits, dtype=np.float64)
            total_bits = round(means[crf] * 1000)
            scaled = np.floor(sizes * total_bits / sizes.sum()).astype(np.int64)
            scaled[0] += total_bits - scaled.sum()
            records[crf] = replace(
                record,
                bitrate_kbps=means[crf],
                psnr_db=record.psnr_db - psnr_penalty_db,
                frame_sizes_bits=tuple(int(size) for size in scaled),
            )
        seconds.append(VideoSecond(t=second.t, records=records))
    return VideoTrace(seconds=tuple(seconds))
