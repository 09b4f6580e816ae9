from __future__ import annotations

from celery import shared_task
from celery.utils.log import get_task_logger

from livecastlab.harness.config import parse_config
from livecastlab.harness.experiment import run_controller

logger = get_task_logger(__name__)


def run_controller_job(config_data: dict, controller: str, seed: int) -> dict:
    """One (controller, seed) run on a JSON config, as a JSON-ready dict."""
    logger.info('Starting run of %s with seed %s', controller, seed)
    return run_controller(parse_config(config_data), controller, seed).to_dict()


@shared_task(soft_time_limit=3_600)
def run_controller_task(config_data: dict, controller: str, seed: int) -> dict:
    return run_controller_job(config_data, controller, seed)
