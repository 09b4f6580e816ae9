from __future__ import annotations

from importlib.metadata import version

# Ensure the Celery app is defined prior to any shared_task definitions, so those tasks
# bind to it. Import the Celery module here for side effects.
from .celery import app as _celery_app  # noqa: F401

__version__ = version('livecastlab')
