from __future__ import annotations

import json
from pathlib import Path

import click

from livecastlab.baselines.registry import MODEL_BASED_CONTROLLERS
from livecastlab.harness.bench import cmd_bench_decision
from livecastlab.harness.config import MIN_BENCH_CALLS, load_config
from livecastlab.predictor import MAX_HORIZON


@click.command()
@click.option(
    '--config', 'config_path', type=click.Path(dir_okay=False, path_type=Path), required=True
)
@click.option('--calls', type=click.IntRange(min=MIN_BENCH_CALLS), help='Decisions to time')
@click.option(
    '--horizon', 'horizons', type=click.IntRange(1, MAX_HORIZON), multiple=True, help='η values'
)
@click.option(
    '--controller',
    'controllers',
    type=click.Choice(MODEL_BASED_CONTROLLERS),
    multiple=True,
    help='Only time these controllers',
)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), help='Write JSON here')
def bench(
    *,
    config_path: Path,
    calls: int | None,
    horizons: tuple[int, ...],
    controllers: tuple[str, ...],
    out: Path | None,
):
    """Time single decisions of the model-based controllers per planning horizon."""
    timings = cmd_bench_decision(
        load_config(config_path),
        calls=calls,
        horizons=horizons or None,
        controllers=controllers or MODEL_BASED_CONTROLLERS,
    )
    for timing in timings:
        click.echo(
            f'{timing.controller:<14} η={timing.horizon:<3} '
            f'median {timing.median_ms:8.3f} ms  std {timing.std_ms:8.3f} ms'
        )
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            json.dump([timing.to_dict() for timing in timings], f, indent=2)
        click.echo(f'Wrote timings to {out}')
