from __future__ import annotations

from pathlib import Path

import click

from livecastlab.harness.config import load_config
from livecastlab.predictor import EwmaPredictor, PredictorConfig, evaluate_predictor
from livecastlab.predictor.bimodal import BimodalPredictor, fit_bimodal
from livecastlab.traces import label_regimes
from livecastlab.traces.io import load_network_trace


@click.command(name='fit-predictor')
@click.option('--trace', 'trace_path', type=click.Path(exists=True, dir_okay=False), required=True)
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option(
    '--holdout',
    'holdout_path',
    type=click.Path(exists=True, dir_okay=False),
    help='Score the fitted model against EWMA on this trace',
)
@click.option(
    '--config',
    'config_path',
    type=click.Path(dir_okay=False, path_type=Path),
    help='Experiment config whose grids and window to use',
)
def fit_predictor(
    *, trace_path: str, out: Path, holdout_path: str | None, config_path: Path | None
):
    """Fit the regime-conditional predictor on a training trace and save it as JSON."""
    config = load_config(config_path).predictor_config if config_path else PredictorConfig()
    model = fit_bimodal(label_regimes(load_network_trace(trace_path), config.schedule), config)
    model.save(out)
    click.echo(
        f'Wrote model to {out}: P(anomaly) is {model.p_anomaly_reallocation:.4f} at '
        f'reallocations and {model.p_anomaly_normal:.4f} elsewhere'
    )

    if holdout_path:
        holdout = load_network_trace(holdout_path)
        for predictor in (BimodalPredictor(model, config), EwmaPredictor(config)):
            report = evaluate_predictor(predictor, holdout)
            click.echo(
                f'{predictor.name}: mean CRPS {report.bandwidth:.2f} kbps (bandwidth), '
                f'{report.loss:.5f} (loss) over {report.predictions} predictions'
            )
