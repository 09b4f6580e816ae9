from __future__ import annotations

from pathlib import Path

import click

from livecastlab.traces import ANOMALY_THRESHOLD, label_regimes, regime_statistics
from livecastlab.traces.io import load_network_trace, write_labels


@click.command()
@click.option('--trace', 'trace_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option(
    '--threshold', type=click.FloatRange(0, 1), default=ANOMALY_THRESHOLD, show_default=True
)
@click.option(
    '--out',
    type=click.Path(dir_okay=False, path_type=Path),
    help='Write the per-second labels as CSV',
)
def label(*, trace_path: str, threshold: float, out: Path | None):
    """Label reallocation and anomalous seconds of a network trace and summarize the regimes."""
    trace = label_regimes(load_network_trace(trace_path), anomaly_threshold=threshold)
    stats = regime_statistics(trace)

    click.echo(f'Reallocation seconds: {stats.reallocation_seconds}')
    click.echo(f'Anomalous fraction at reallocations: {stats.reallocation_anomaly_fraction:.4f}')
    click.echo(f'Anomalous fraction elsewhere: {stats.normal_anomaly_fraction:.4f}')
    click.echo(f'Bandwidth decrease when anomalous: {stats.bandwidth_decrease:.2%}')
    click.echo(f'Loss factor when anomalous: {stats.loss_factor:.2f}x')
    click.echo(f'Latency factor when anomalous: {stats.latency_factor:.2f}x')

    if out:
        write_labels(trace, out)
        click.echo(f'Wrote labels to {out}')
