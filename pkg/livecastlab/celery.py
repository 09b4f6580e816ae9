from __future__ import annotations

from celery import Celery
import celery.app.trace

from livecastlab import settings

celery.app.trace.LOG_RECEIVED = """\
Task %(name)s[%(id)s] received: (%(args)s, %(kwargs)s)\
"""

app = Celery('livecastlab')

app.conf.update(
    broker_url=settings.CELERY_BROKER_URL,
    result_backend=settings.CELERY_RESULT_BACKEND,
    task_serializer='json',
    result_serializer='json',
    accept_content=['json'],
    # Without a broker, run tasks synchronously in-process
    task_always_eager=settings.CELERY_BROKER_URL is None,
    task_eager_propagates=True,
)

app.autodiscover_tasks(['livecastlab.harness'])
