"""Per-second report CSVs."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pandas as pd

from livecastlab.traces.io import FLOAT_FORMAT

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from livecastlab.simnet import SecondReport

REPORT_COLUMNS = [
    't',
    'crf',
    'gamma',
    'alpha',
    'sent_data',
    'sent_parity',
    'lost',
    'recovered',
    'frames_delivered',
    'psnr_db',
    'stall',
]


def report_row(report: SecondReport) -> dict:
    return {
        't': report.t,
        'crf': report.decision.crf,
        'gamma': report.decision.frame_rate,
        'alpha': report.decision.fec_ratio,
        'sent_data': report.sent_data,
        'sent_parity': report.sent_parity,
        'lost': report.lost,
        'recovered': report.recovered,
        'frames_delivered': report.frames_delivered,
        'psnr_db': report.psnr_db,
        'stall': int(report.stall),
    }


def reports_frame(rows: Iterable[dict]) -> pd.DataFrame:
    return pd.DataFrame(list(rows), columns=REPORT_COLUMNS)


def write_reports(rows: Iterable[dict], path: Path | str) -> None:
    reports_frame(rows).to_csv(
        path, index=False, lineterminator='\n', encoding='utf-8', float_format=FLOAT_FORMAT
    )
