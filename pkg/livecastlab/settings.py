"""
Runtime settings, read from the environment.

Experiment parameters do not live here; they come from the experiment JSON config
(see `livecastlab.harness.config`). These settings only describe the process.
"""

from __future__ import annotations

import os
from pathlib import Path

ENV_PREFIX = 'LIVECASTLAB_'


def _env(name: str, default: str | None = None) -> str | None:
    return os.environ.get(f'{ENV_PREFIX}{name}', default)


LOG_LEVEL: str = (_env('LOG_LEVEL', 'INFO') or 'INFO').upper()

# When unset, Celery tasks run eagerly inside the calling process
CELERY_BROKER_URL: str | None = _env('CELERY_BROKER_URL') or None
CELERY_RESULT_BACKEND: str | None = _env('CELERY_RESULT_BACKEND') or None
# Worker processes for brokerless runs; -1 uses every core
LOCAL_JOBS: int = int(_env('LOCAL_JOBS', '-1') or -1)

OUTPUT_DIR: Path = Path(_env('OUTPUT_DIR', 'runs') or 'runs')

DEFAULT_CRF_DISTRIBUTIONS_PATH: Path = Path(__file__).parent / 'crf_model' / 'data' / (
    'default_crf_distributions.json'
)
