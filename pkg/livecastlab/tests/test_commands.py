from __future__ import annotations

import json

from click.testing import CliRunner
import pandas as pd
import pytest

from livecastlab.commands import cli
from livecastlab.crf_model import CrfBitrateModel, load_default_distributions
from livecastlab.predictor.bimodal import BimodalModel
from livecastlab.traces.io import LABEL_COLUMNS, load_network_trace, load_video_trace


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture()
def invoke(runner):
    def invoke(*args, exit_code: int = 0):
        result = runner.invoke(cli, [str(arg) for arg in args], catch_exceptions=False)
        assert result.exit_code == exit_code, result.output
        return result

    return invoke


def test_gen_net(tmp_path, invoke):
    result = invoke('gen-net', '--duration', 120, '--seed', 3, '--out', tmp_path / 'a.csv')
    assert 'Wrote 120 seconds' in result.output
    invoke('gen-net', '--duration', 120, '--seed', 3, '--out', tmp_path / 'b.csv')
    assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()

    invoke('gen-net', '--duration', 5, '--start-t', 60, '--out', tmp_path / 'c.csv')
    assert load_network_trace(tmp_path / 'c.csv').start == 60


def test_gen_net_with_config(tmp_path, invoke, small_config_data):
    config = tmp_path / 'config.json'
    synthesis = {'synthesis': {'regime': {'loss_mean': 0.01}}}
    config.write_text(json.dumps(small_config_data | synthesis))
    invoke('gen-net', '--duration', 10, '--out', tmp_path / 'net.csv', '--config', config)
    assert len(load_network_trace(tmp_path / 'net.csv')) == 10


def test_gen_video(tmp_path, invoke):
    result = invoke(
        'gen-video',
        '--duration',
        30,
        '--out',
        tmp_path / 'vbr.csv',
        '--cbr-out',
        tmp_path / 'cbr.csv',
    )
    assert 'Wrote 30 seconds of 6 CRFs' in result.output
    vbr = load_video_trace(tmp_path / 'vbr.csv')
    cbr = load_video_trace(tmp_path / 'cbr.csv')
    assert len(vbr) == len(cbr) == 30
    assert vbr.crfs == cbr.crfs


def test_gen_video_crf_defaults(tmp_path, invoke):
    invoke(
        'gen-video',
        '--duration',
        120,
        '--out',
        tmp_path / 'vbr.csv',
        '--crf-defaults-out',
        tmp_path / 'defaults.json',
    )
    defaults = load_default_distributions(tmp_path / 'defaults.json')
    assert sorted(defaults) == [26, 31, 36, 41, 46, 51]
    means = [defaults[crf].mean for crf in sorted(defaults)]
    assert means == sorted(means, reverse=True)
    # The table drives a working model
    assert CrfBitrateModel(defaults).expected_bitrate(51) == pytest.approx(means[-1])


def test_label(tmp_path, invoke):
    invoke('gen-net', '--duration', 120, '--out', tmp_path / 'net.csv')
    result = invoke('label', '--trace', tmp_path / 'net.csv', '--out', tmp_path / 'labels.csv')
    assert 'Reallocation seconds: 8' in result.output
    labels = pd.read_csv(tmp_path / 'labels.csv')
    assert list(labels.columns) == LABEL_COLUMNS
    assert labels['is_reallocation'].sum() == 8


def test_fit_predictor(tmp_path, invoke):
    invoke('gen-net', '--duration', 1_200, '--seed', 1, '--out', tmp_path / 'train.csv')
    invoke('gen-net', '--duration', 400, '--seed', 2, '--out', tmp_path / 'holdout.csv')
    result = invoke(
        'fit-predictor',
        '--trace',
        tmp_path / 'train.csv',
        '--out',
        tmp_path / 'model.json',
        '--holdout',
        tmp_path / 'holdout.csv',
    )
    model = BimodalModel.load(tmp_path / 'model.json')
    assert 0 < model.p_anomaly_reallocation <= 1
    assert 'bimodal: mean CRPS' in result.output
    assert 'ewma: mean CRPS' in result.output


def test_run(tmp_path, invoke, config_file):
    out = tmp_path / 'out'
    result = invoke('run', '--config', config_file, '--seed', 4, '--out', out)
    assert 'BAROC' in result.output
    assert 'FBRA-like' in result.output
    assert (out / 'seed_4' / 'seconds_baroc.csv').is_file()
    summary = json.loads((out / 'summary.json').read_text())
    assert summary['seeds'] == [4]


def test_bench(tmp_path, invoke, config_file):
    result = invoke(
        'bench',
        '--config',
        config_file,
        '--controller',
        'informer-vbr',
        '--horizon',
        1,
        '--out',
        tmp_path / 'bench.json',
    )
    assert 'informer-vbr' in result.output
    (timing,) = json.loads((tmp_path / 'bench.json').read_text())
    assert timing['calls'] == 1_000
    assert timing['horizon'] == 1


def test_bench_rejects_few_calls(invoke, config_file):
    invoke('bench', '--config', config_file, '--calls', 10, exit_code=2)


def test_invalid_config_exit_code(tmp_path, invoke, small_config_data):
    config = tmp_path / 'bad.json'
    config.write_text(json.dumps(small_config_data | {'duration_s': 0}))
    result = invoke('run', '--config', config, exit_code=2)
    assert 'Invalid config field duration_s' in result.output


def test_missing_config_exit_code(tmp_path, invoke):
    result = invoke('run', '--config', tmp_path / 'absent.json', exit_code=2)
    assert 'Invalid config field <file>' in result.output
