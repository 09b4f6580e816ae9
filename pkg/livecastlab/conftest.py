from __future__ import annotations

import json

import pytest
from pytest_factoryboy import register

from livecastlab.crf_model import CrfBitrateModel, load_default_distributions
from livecastlab.tests.factories import (
    CrfRecordFactory,
    DecisionFactory,
    GridFactory,
    NetworkSampleFactory,
    QoeWeightsFactory,
    VideoSecondFactory,
)
from livecastlab.traces import NetworkTrace, VideoTrace

register(GridFactory)
register(NetworkSampleFactory)
register(CrfRecordFactory)
register(VideoSecondFactory)
register(DecisionFactory)
register(QoeWeightsFactory)


@pytest.fixture()
def crf_model() -> CrfBitrateModel:
    """A model answering from the shipped default distributions only."""
    return CrfBitrateModel(load_default_distributions())


@pytest.fixture()
def network_trace_factory(network_sample_factory):
    def factory(rows, start_t: int = 0) -> NetworkTrace:
        """Build a trace from (bandwidth, loss) pairs, one per second from `start_t`."""
        return NetworkTrace(
            samples=tuple(
                network_sample_factory(t=start_t + i, bandwidth_kbps=bandwidth, loss_ratio=loss)
                for i, (bandwidth, loss) in enumerate(rows)
            )
        )

    return factory


@pytest.fixture()
def video_trace_factory(video_second_factory):
    def factory(duration_s: int, start_t: int = 0) -> VideoTrace:
        return VideoTrace(
            seconds=tuple(video_second_factory(t=start_t + i) for i in range(duration_s))
        )

    return factory


@pytest.fixture()
def small_config_data() -> dict:
    """A config that simulates a few minutes, quick enough for end-to-end tests."""
    return {
        'controllers': ['baroc', 'fbra'],
        'seeds': [1],
        'duration_s': 90,
        'train_seconds': 1200,
        'scheduler': {'horizon': 2, 'input_length': 60},
        'bench': {'calls': 1000, 'horizons': [1, 2]},
    }


@pytest.fixture()
def config_file(tmp_path, small_config_data):
    path = tmp_path / 'small.json'
    path.write_text(json.dumps(small_config_data))
    return path
