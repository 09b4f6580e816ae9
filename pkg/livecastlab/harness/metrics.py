"""Per-controller summary metrics over the seconds of all seeds."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from livecastlab.simnet.io import reports_frame

if TYPE_CHECKING:
    from collections.abc import Iterable

    from livecastlab.harness.experiment import ControllerRun

CDF_POINTS = 101


def cdf_points(values: Iterable[float], points: int = CDF_POINTS) -> list[list[float]]:
    """`points` (value, cumulative probability) pairs at evenly spaced quantiles."""
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        return []
    probabilities = np.linspace(0.0, 1.0, points)
    quantiles = np.quantile(values, probabilities, method='linear')
    return [[float(v), float(p)] for v, p in zip(quantiles, probabilities, strict=True)]


@dataclass(frozen=True)
class ControllerSummary:
    controller: str
    label: str
    seconds: int
    stalls: int
    mean_psnr_db: float
    mean_fps: float
    mean_recovery_ratio: float
    mean_parity_utility: float
    overall_recovery_ratio: float
    overall_parity_utility: float
    mean_decision_time_ms: float
    psnr_cdf: list[list[float]]
    fps_cdf: list[list[float]]
    recovery_ratio_cdf: list[list[float]]
    parity_utility_cdf: list[list[float]]

    def to_dict(self) -> dict:
        return asdict(self)


def per_second_metrics(df: pd.DataFrame) -> pd.DataFrame:
    """Add recovery ratio and parity utility columns to a frame of report rows."""
    lost = df['lost'].to_numpy()
    parity = df['sent_parity'].to_numpy()
    recovered = df['recovered'].to_numpy()
    return df.assign(
        recovery_ratio=np.divide(recovered, lost, out=np.ones(len(df)), where=lost > 0),
        parity_utility=np.divide(recovered, parity, out=np.zeros(len(df)), where=parity > 0),
    )


def _mean(series: pd.Series) -> float:
    return float(series.mean()) if len(series) else float('nan')


def summarize(runs: Iterable[ControllerRun], controller: str, label: str) -> ControllerSummary:
    runs = list(runs)
    df = per_second_metrics(reports_frame(row for run in runs for row in run.rows))
    stall = df['stall'].astype(bool)
    played = df[~stall]
    times = [t for run in runs for t in run.decision_times_ms]
    lost = int(df['lost'].sum())
    parity = int(df['sent_parity'].sum())
    recovered = int(df['recovered'].sum())

    return ControllerSummary(
        controller=controller,
        label=label,
        seconds=len(df),
        stalls=int(stall.sum()),
        mean_psnr_db=_mean(played['psnr_db']),
        mean_fps=_mean(df['frames_delivered']),
        mean_recovery_ratio=_mean(df['recovery_ratio']),
        mean_parity_utility=_mean(df['parity_utility']),
        overall_recovery_ratio=recovered / lost if lost else 1.0,
        overall_parity_utility=recovered / parity if parity else 0.0,
        mean_decision_time_ms=float(np.mean(times)) if times else float('nan'),
        psnr_cdf=cdf_points(played['psnr_db']),
        fps_cdf=cdf_points(df['frames_delivered']),
        recovery_ratio_cdf=cdf_points(df['recovery_ratio']),
        parity_utility_cdf=cdf_points(df['parity_utility']),
    )
