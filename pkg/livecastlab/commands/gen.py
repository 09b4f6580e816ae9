from __future__ import annotations

import json
from pathlib import Path

import click

from livecastlab.crf_model import estimate_default_distributions
from livecastlab.harness.config import load_config
from livecastlab.traces.io import write_network_trace, write_video_trace
from livecastlab.traces.synthetic import (
    RdParams,
    RegimeParams,
    gen_synthetic_trace,
    gen_synthetic_video,
    to_cbr,
)

_config_option = click.option(
    '--config',
    'config_path',
    type=click.Path(dir_okay=False, path_type=Path),
    help='Experiment config whose synthesis parameters to use',
)


@click.command(name='gen-net')
@click.option('--duration', type=click.IntRange(min=1), default=3600, show_default=True)
@click.option('--seed', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--start-t', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), required=True)
@_config_option
def gen_net(*, duration: int, seed: int, start_t: int, out: Path, config_path: Path | None):
    """Generate a synthetic bimodal network trace."""
    params = load_config(config_path).synthesis.regime if config_path else RegimeParams()
    trace = gen_synthetic_trace(duration, seed, params, start_t=start_t)
    write_network_trace(trace, out)
    click.echo(
        f'Wrote {len(trace)} seconds to {out} '
        f'({sum(trace.injected_anomalies or ())} anomalous seconds injected)'
    )


@click.command(name='gen-video')
@click.option('--duration', type=click.IntRange(min=1), default=3600, show_default=True)
@click.option('--seed', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--start-t', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option(
    '--cbr-out',
    type=click.Path(dir_okay=False, path_type=Path),
    help='Also write the constant-bitrate variant here',
)
@click.option(
    '--crf-defaults-out',
    type=click.Path(dir_okay=False, path_type=Path),
    help='Also write the default CRF distribution table estimated from this trace here',
)
@_config_option
def gen_video(
    *,
    duration: int,
    seed: int,
    start_t: int,
    out: Path,
    cbr_out: Path | None,
    crf_defaults_out: Path | None,
    config_path: Path | None,
):
    """Generate a synthetic per-CRF video rate-distortion trace."""
    if config_path:
        synthesis = load_config(config_path).synthesis
        rd, penalty = synthesis.rd, synthesis.cbr_psnr_penalty_db
    else:
        rd, penalty = RdParams(), 2.35
    video = gen_synthetic_video(duration, seed, rd, start_t=start_t)
    write_video_trace(video, out)
    click.echo(f'Wrote {len(video)} seconds of {len(video.crfs)} CRFs to {out}')
    if cbr_out:
        write_video_trace(to_cbr(video, penalty), cbr_out)
        click.echo(f'Wrote the CBR variant to {cbr_out}')
    if crf_defaults_out:
        with open(crf_defaults_out, 'w', encoding='utf-8') as f:
            json.dump(estimate_default_distributions(video), f, indent=2)
            f.write('\n')
        click.echo(f'Wrote the default CRF distributions to {crf_defaults_out}')
