"""CSV readers and writers for network and video traces."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from livecastlab.traces import (
    MAX_FRAME_RATE,
    CrfRecord,
    NetworkSample,
    NetworkTrace,
    VideoSecond,
    VideoTrace,
)
from livecastlab.traces.exceptions import NonMonotoneTimestampsError, TraceSchemaError

if TYPE_CHECKING:
    from pathlib import Path

NETWORK_COLUMNS = ['t', 'bandwidth_kbps', 'loss_ratio', 'latency_ms']
VIDEO_COLUMNS = ['t', 'crf', 'bitrate_kbps', 'psnr_db', 'frame_sizes_bits']
FRAME_SIZE_SEPARATOR = ';'
# 17 significant digits always round-trip a float64
FLOAT_FORMAT = '%.17g'

# Data rows start on the second line of the file, after the header
_FIRST_DATA_LINE = 2


def _read_frame(path: Path | str, columns: list[str]) -> pd.DataFrame:
    df = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    if list(df.columns) != columns:
        raise TraceSchemaError(path, 1, f'expected header {",".join(columns)}')
    return df


def _numeric(df: pd.DataFrame, path: Path | str, column: str, *, integer: bool = False):
    # Python's own parsers keep the text-to-float conversion exact, so round trips are lossless
    parse = int if integer else float
    values = []
    for row, raw in enumerate(df[column]):
        try:
            value = parse(raw)
        except ValueError:
            value = None
        if value is None or not math.isfinite(value):
            kind = 'integer' if integer else 'number'
            raise TraceSchemaError(path, row + _FIRST_DATA_LINE, f'{column} is not a valid {kind}')
        values.append(value)
    return np.array(values, dtype=np.int64 if integer else np.float64)


def _check_range(path, column: str, values: np.ndarray, low: float, high: float | None = None):
    bad = values < low
    if high is not None:
        bad |= values > high
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        bounds = f'[{low}, {high}]' if high is not None else f'>= {low}'
        raise TraceSchemaError(path, row + _FIRST_DATA_LINE, f'{column} must be {bounds}')


def _check_increasing(path, ts: np.ndarray):
    bad = np.flatnonzero(np.diff(ts) <= 0)
    if bad.size:
        raise NonMonotoneTimestampsError(path, int(bad[0]) + 1 + _FIRST_DATA_LINE)


def load_network_trace(path: Path | str) -> NetworkTrace:
    """Parse a network trace CSV. Regime labels are not applied."""
    df = _read_frame(path, NETWORK_COLUMNS)
    ts = _numeric(df, path, 't', integer=True)
    bandwidth = _numeric(df, path, 'bandwidth_kbps')
    loss = _numeric(df, path, 'loss_ratio')
    latency = _numeric(df, path, 'latency_ms')

    _check_range(path, 'bandwidth_kbps', bandwidth, 0)
    _check_range(path, 'loss_ratio', loss, 0, 1)
    _check_range(path, 'latency_ms', latency, 0)
    _check_increasing(path, ts)

    return NetworkTrace(
        samples=tuple(
            NetworkSample(
                t=int(t), bandwidth_kbps=float(b), loss_ratio=float(l_), latency_ms=float(lat)
            )
            for t, b, l_, lat in zip(ts, bandwidth, loss, latency, strict=True)
        )
    )


def write_network_trace(trace: NetworkTrace, path: Path | str) -> None:
    df = pd.DataFrame(
        {
            't': [sample.t for sample in trace],
            'bandwidth_kbps': trace.column('bandwidth_kbps'),
            'loss_ratio': trace.column('loss_ratio'),
            'latency_ms': trace.column('latency_ms'),
        },
        columns=NETWORK_COLUMNS,
    )
    df.to_csv(
        path, index=False, lineterminator='\n', encoding='utf-8', float_format=FLOAT_FORMAT
    )


def _frame_sizes(path, line: int, raw: str) -> tuple[int, ...]:
    parts = raw.split(FRAME_SIZE_SEPARATOR)
    if len(parts) != MAX_FRAME_RATE:
        raise TraceSchemaError(
            path, line, f'expected {MAX_FRAME_RATE} frame sizes, got {len(parts)}'
        )
    try:
        sizes = tuple(int(part) for part in parts)
    except ValueError as e:
        raise TraceSchemaError(path, line, 'frame sizes must be integers') from e
    if min(sizes) < 0:
        raise TraceSchemaError(path, line, 'frame sizes must be non-negative')
    return sizes


def load_video_trace(path: Path | str) -> VideoTrace:
    df = _read_frame(path, VIDEO_COLUMNS)
    ts = _numeric(df, path, 't', integer=True)
    crfs = _numeric(df, path, 'crf', integer=True)
    bitrates = _numeric(df, path, 'bitrate_kbps')
    psnrs = _numeric(df, path, 'psnr_db')
    _check_range(path, 'bitrate_kbps', bitrates, 0)

    seconds: list[VideoSecond] = []
    records: dict[int, CrfRecord] = {}
    current_t: int | None = None
    for row, (t, crf, bitrate, psnr, raw) in enumerate(
        zip(ts, crfs, bitrates, psnrs, df['frame_sizes_bits'], strict=True)
    ):
        line = row + _FIRST_DATA_LINE
        if current_t is not None and t != current_t:
            # Rows are grouped by second, and seconds must increase
            if t < current_t:
                raise NonMonotoneTimestampsError(path, line)
            seconds.append(VideoSecond(t=current_t, records=records))
            records = {}
        if int(crf) in records:
            raise TraceSchemaError(path, line, f'duplicate crf {crf} for t={t}')
        current_t = int(t)
        records[int(crf)] = CrfRecord(
            bitrate_kbps=float(bitrate),
            psnr_db=float(psnr),
            frame_sizes_bits=_frame_sizes(path, line, raw),
        )
    if current_t is not None:
        seconds.append(VideoSecond(t=current_t, records=records))

    return VideoTrace(seconds=tuple(seconds))


def write_video_trace(trace: VideoTrace, path: Path | str) -> None:
    rows = [
        {
            't': second.t,
            'crf': crf,
            'bitrate_kbps': record.bitrate_kbps,
            'psnr_db': record.psnr_db,
            'frame_sizes_bits': FRAME_SIZE_SEPARATOR.join(str(s) for s in record.frame_sizes_bits),
        }
        for second in trace
        for crf, record in sorted(second.records.items())
    ]
    pd.DataFrame(rows, columns=VIDEO_COLUMNS).to_csv(
        path, index=False, lineterminator='\n', encoding='utf-8', float_format=FLOAT_FORMAT
    )


LABEL_COLUMNS = ['t', 'is_reallocation', 'is_anomaly']


def write_labels(trace: NetworkTrace, path: Path | str) -> None:
    pd.DataFrame(
        {
            't': [sample.t for sample in trace],
            'is_reallocation': [int(sample.is_reallocation) for sample in trace],
            'is_anomaly': [int(sample.is_anomaly) for sample in trace],
        },
        columns=LABEL_COLUMNS,
    ).to_csv(path, index=False, lineterminator='\n', encoding='utf-8')
