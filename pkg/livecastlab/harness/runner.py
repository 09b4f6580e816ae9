from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import TYPE_CHECKING

from celery import group
from joblib import Parallel, delayed

from livecastlab import settings
from livecastlab.baselines.registry import CONTROLLERS
from livecastlab.harness.experiment import ControllerRun
from livecastlab.harness.metrics import summarize
from livecastlab.harness.tasks import run_controller_job, run_controller_task
from livecastlab.simnet.io import write_reports

if TYPE_CHECKING:
    from livecastlab.harness.config import ExperimentConfig

logger = logging.getLogger(__name__)


def _write_json(data, path: Path) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')


def dispatch_runs(config: ExperimentConfig, *, n_jobs: int | None = None) -> list[ControllerRun]:
    """
    Run every controller on every seed, in (controller, seed) order.

    With a broker configured the runs go to Celery workers. Otherwise they fan out over
    `n_jobs` local processes (`LIVECASTLAB_LOCAL_JOBS` by default, -1 for one per core).
    """
    config_data = config.to_dict()
    jobs = [(controller, seed) for controller in config.controllers for seed in config.seeds]
    if settings.CELERY_BROKER_URL is not None:
        logger.info('Dispatching %s runs to Celery workers', len(jobs))
        results = group(
            run_controller_task.s(config_data, controller, seed) for controller, seed in jobs
        ).apply_async()
        return [ControllerRun.from_dict(result) for result in results.get()]

    n_jobs = settings.LOCAL_JOBS if n_jobs is None else n_jobs
    logger.info('Running %s runs locally with n_jobs=%s', len(jobs), n_jobs)
    results = Parallel(n_jobs=n_jobs, prefer='processes')(
        delayed(run_controller_job)(config_data, controller, seed) for controller, seed in jobs
    )
    return [ControllerRun.from_dict(result) for result in results]


def cmd_run(config: ExperimentConfig, out_dir: Path | str) -> dict:
    """
    Run the experiment and write its outputs.

    `out_dir` receives the resolved `config.json`, a `summary.json` with per-controller metrics,
    and one `seed_<seed>/seconds_<controller>.csv` per run.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(config.to_dict(), out_dir / 'config.json')

    runs = dispatch_runs(config)
    for run in runs:
        seed_dir = out_dir / f'seed_{run.seed}'
        seed_dir.mkdir(exist_ok=True)
        write_reports(run.rows, seed_dir / f'seconds_{run.controller}.csv')

    summary = {
        'controllers': [
            summarize(
                [run for run in runs if run.controller == controller],
                controller,
                CONTROLLERS[controller].label,
            ).to_dict()
            for controller in config.controllers
        ],
        'seeds': list(config.seeds),
    }
    _write_json(summary, out_dir / 'summary.json')
    return summary
