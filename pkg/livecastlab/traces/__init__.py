"""Per-second network traces, per-second video rate-distortion traces, and regime labeling."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

# Seconds within each minute at which the UE-satellite link is rescheduled
REALLOCATION_SCHEDULE: frozenset[int] = frozenset({12, 27, 42, 57})
ANOMALY_THRESHOLD = 0.02

CRF_SET: tuple[int, ...] = (26, 31, 36, 41, 46, 51)
MAX_FRAME_RATE = 60

I_FRAME = 'I'
P_FRAME = 'P'


@dataclass(frozen=True)
class NetworkSample:
    t: int
    bandwidth_kbps: float
    loss_ratio: float
    latency_ms: float
    is_reallocation: bool = False
    is_anomaly: bool = False


@dataclass(frozen=True)
class NetworkTrace:
    samples: tuple[NetworkSample, ...]
    labeled: bool = False
    # Ground truth regime of each sample, only known for synthetic traces
    injected_anomalies: tuple[bool, ...] | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[NetworkSample]:
        return iter(self.samples)

    def __getitem__(self, index: int) -> NetworkSample:
        return self.samples[index]

    @property
    def start(self) -> int:
        return self.samples[0].t

    def window(self, start: int, stop: int) -> NetworkTrace:
        """Return the samples with index in [start, stop), keeping labels and ground truth."""
        injected = self.injected_anomalies[start:stop] if self.injected_anomalies else None
        return replace(self, samples=self.samples[start:stop], injected_anomalies=injected)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(sample, name) for sample in self.samples], dtype=np.float64)


@dataclass(frozen=True)
class CrfRecord:
    bitrate_kbps: float
    psnr_db: float
    frame_sizes_bits: tuple[int, ...]

    @property
    def frame_types(self) -> tuple[str, ...]:
        # Every second is one GOP: an I-frame followed by P-frames
        return (I_FRAME,) + (P_FRAME,) * (len(self.frame_sizes_bits) - 1)


@dataclass(frozen=True)
class VideoSecond:
    t: int
    records: dict[int, CrfRecord]

    def __getitem__(self, crf: int) -> CrfRecord:
        return self.records[crf]


@dataclass(frozen=True)
class VideoTrace:
    seconds: tuple[VideoSecond, ...]

    def __len__(self) -> int:
        return len(self.seconds)

    def __iter__(self) -> Iterator[VideoSecond]:
        return iter(self.seconds)

    def __getitem__(self, index: int) -> VideoSecond:
        return self.seconds[index]

    @cached_property
    def crfs(self) -> tuple[int, ...]:
        return tuple(sorted(self.seconds[0].records)) if self.seconds else ()


def is_reallocation_second(t: int, schedule: Iterable[int] = REALLOCATION_SCHEDULE) -> bool:
    return t % 60 in schedule


def reallocation_feature(
    ts: Sequence[int], schedule: Iterable[int] = REALLOCATION_SCHEDULE
) -> np.ndarray:
    """Binary per-second marker series, 1 at scheduled reallocation seconds."""
    schedule = frozenset(schedule)
    return np.array([1 if t % 60 in schedule else 0 for t in ts], dtype=np.int8)


def label_regimes(
    trace: NetworkTrace,
    schedule: Iterable[int] = REALLOCATION_SCHEDULE,
    anomaly_threshold: float = ANOMALY_THRESHOLD,
) -> NetworkTrace:
    schedule = frozenset(schedule)
    samples = tuple(
        replace(
            sample,
            is_reallocation=sample.t % 60 in schedule,
            # Inclusive comparison: a loss ratio of exactly the threshold is anomalous
            is_anomaly=sample.loss_ratio >= anomaly_threshold,
        )
        for sample in trace.samples
    )
    return replace(trace, samples=samples, labeled=True)


@dataclass(frozen=True)
class RegimeStatistics:
    reallocation_seconds: int
    normal_seconds: int
    reallocation_anomaly_fraction: float
    normal_anomaly_fraction: float
    anomalous_mean_bandwidth_kbps: float
    normal_mean_bandwidth_kbps: float
    anomalous_mean_loss_ratio: float
    normal_mean_loss_ratio: float
    anomalous_mean_latency_ms: float
    normal_mean_latency_ms: float

    @property
    def bandwidth_decrease(self) -> float:
        return 1 - _ratio(self.anomalous_mean_bandwidth_kbps, self.normal_mean_bandwidth_kbps)

    @property
    def loss_factor(self) -> float:
        return _ratio(self.anomalous_mean_loss_ratio, self.normal_mean_loss_ratio)

    @property
    def latency_factor(self) -> float:
        return _ratio(self.anomalous_mean_latency_ms, self.normal_mean_latency_ms)


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator else float('nan')


def _mean(values: np.ndarray) -> float:
    return float(values.mean()) if values.size else float('nan')


def regime_statistics(trace: NetworkTrace) -> RegimeStatistics:
    """
    Summarize how reallocations relate to anomalies in a labeled trace.

    Anomalous means are taken over anomalous reallocation seconds, normal means over
    non-anomalous seconds.
    """
    reallocation = np.array([s.is_reallocation for s in trace.samples], dtype=bool)
    anomaly = np.array([s.is_anomaly for s in trace.samples], dtype=bool)
    anomalous = reallocation & anomaly
    normal = ~anomaly

    bandwidth = trace.column('bandwidth_kbps')
    loss = trace.column('loss_ratio')
    latency = trace.column('latency_ms')

    return RegimeStatistics(
        reallocation_seconds=int(reallocation.sum()),
        normal_seconds=int((~reallocation).sum()),
        reallocation_anomaly_fraction=_mean(anomaly[reallocation]),
        normal_anomaly_fraction=_mean(anomaly[~reallocation]),
        anomalous_mean_bandwidth_kbps=_mean(bandwidth[anomalous]),
        normal_mean_bandwidth_kbps=_mean(bandwidth[normal]),
        anomalous_mean_loss_ratio=_mean(loss[anomalous]),
        normal_mean_loss_ratio=_mean(loss[normal]),
        anomalous_mean_latency_ms=_mean(latency[anomalous]),
        normal_mean_latency_ms=_mean(latency[normal]),
    )
