from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import click

from livecastlab import settings
from livecastlab.harness.config import load_config
from livecastlab.harness.runner import cmd_run


@click.command()
@click.option(
    '--config', 'config_path', type=click.Path(dir_okay=False, path_type=Path), required=True
)
@click.option(
    '--seed',
    'seeds',
    type=click.IntRange(min=0),
    multiple=True,
    help='Run these seeds instead of the configured ones',
)
@click.option('--out', type=click.Path(file_okay=False, path_type=Path))
def run(*, config_path: Path, seeds: tuple[int, ...], out: Path | None):
    """Run every configured controller on every seed and summarize the results."""
    config = load_config(config_path)
    if seeds:
        config = replace(config, seeds=seeds)
    out = out or settings.OUTPUT_DIR / config_path.stem

    summary = cmd_run(config, out)
    for entry in summary['controllers']:
        click.echo(
            f'{entry["label"]:<40} PSNR {entry["mean_psnr_db"]:6.2f} dB  '
            f'FPS {entry["mean_fps"]:5.1f}  '
            f'recovery {entry["overall_recovery_ratio"]:.3f}  '
            f'parity utility {entry["overall_parity_utility"]:.3f}  '
            f'stalls {entry["stalls"]}'
        )
    click.echo(f'Wrote results to {out}')
