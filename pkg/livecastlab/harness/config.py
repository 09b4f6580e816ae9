"""
Experiment configuration.

A config is a JSON document. It is validated against `CONFIG_SCHEMA` and then materialized into
frozen dataclasses; every omitted field takes the default shown in the schema's dataclasses.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any

import jsonschema
import jsonschema.exceptions

from livecastlab.baselines import BaselineCalibration, FbraCalibration
from livecastlab.baselines.registry import CONTROLLERS
from livecastlab.distributions import Grid
from livecastlab.exceptions import LabError
from livecastlab.harness.exceptions import ConfigError
from livecastlab.predictor import EWMA_SMOOTHING, MAX_HORIZON, PredictorConfig
from livecastlab.scheduler import QoeWeights
from livecastlab.simnet import DECODE_POLICIES
from livecastlab.traces.synthetic import RdParams, RegimeParams

if TYPE_CHECKING:
    from collections.abc import Callable

PREDICTORS = ('bimodal', 'ewma', 'oracle')
MIN_BENCH_CALLS = 1000


def _object(properties: dict[str, Any]) -> dict[str, Any]:
    return {'type': 'object', 'properties': properties, 'additionalProperties': False}


def _fields_of(cls) -> dict[str, Any]:
    return _object({f.name: {} for f in fields(cls)})


_NUMBER = {'type': 'number'}
_POSITIVE = {'type': 'number', 'exclusiveMinimum': 0}
_WEIGHT = {'type': 'number', 'minimum': 0, 'maximum': 1}
_PATH = {'type': 'string', 'minLength': 1}

CONFIG_SCHEMA: dict[str, Any] = {
    '$schema': 'https://json-schema.org/draft/2020-12/schema',
    **_object(
        {
            'controllers': {
                'type': 'array',
                'minItems': 1,
                'uniqueItems': True,
                'items': {'enum': sorted(CONTROLLERS)},
            },
            'seeds': {
                'type': 'array',
                'minItems': 1,
                'uniqueItems': True,
                'items': {'type': 'integer', 'minimum': 0, 'maximum': 2**64 - 1},
            },
            'duration_s': {'type': 'integer', 'minimum': 1},
            'train_seconds': {'type': 'integer', 'minimum': 1},
            'network_trace': _PATH,
            'video_trace': _PATH,
            'training_trace': _PATH,
            'decode_policy': {'enum': list(DECODE_POLICIES)},
            'grids': _object(
                {
                    'bandwidth_max_kbps': _POSITIVE,
                    'bandwidth_interval_kbps': _POSITIVE,
                    'loss_interval': {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 1},
                }
            ),
            'scheduler': _object(
                {
                    'horizon': {'type': 'integer', 'minimum': 1, 'maximum': MAX_HORIZON},
                    'input_length': {'type': 'integer', 'minimum': 1},
                    'predictor': {'enum': list(PREDICTORS)},
                    'ewma_smoothing': {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 1},
                    'qoe_weights': _object(
                        {'frame_rate': _WEIGHT, 'quality': _WEIGHT, 'smoothness': _WEIGHT}
                    ),
                }
            ),
            'synthesis': _object(
                {
                    'regime': _fields_of(RegimeParams),
                    'rd': _fields_of(RdParams),
                    'cbr_psnr_penalty_db': _NUMBER,
                }
            ),
            'calibration': _object(
                {
                    'fbra': _fields_of(FbraCalibration),
                    'rfec_media_share': {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 1},
                    'max_fec_ratio': {'type': 'number', 'minimum': 0},
                }
            ),
            'bench': _object(
                {
                    'calls': {'type': 'integer', 'minimum': MIN_BENCH_CALLS},
                    'horizons': {
                        'type': 'array',
                        'minItems': 1,
                        'items': {'type': 'integer', 'minimum': 1, 'maximum': MAX_HORIZON},
                    },
                }
            ),
        }
    ),
    'required': ['controllers', 'seeds'],
}


@dataclass(frozen=True)
class GridConfig:
    bandwidth_max_kbps: float = 15_000.0
    bandwidth_interval_kbps: float = 500.0
    loss_interval: float = 0.02

    @property
    def bandwidth_grid(self) -> Grid:
        return Grid(0.0, self.bandwidth_max_kbps, self.bandwidth_interval_kbps)

    @property
    def loss_grid(self) -> Grid:
        return Grid(0.0, 1.0, self.loss_interval)


@dataclass(frozen=True)
class SchedulerConfig:
    horizon: int = 5
    input_length: int = 180
    predictor: str = 'bimodal'
    ewma_smoothing: float = EWMA_SMOOTHING
    qoe_weights: QoeWeights = field(default_factory=QoeWeights)


@dataclass(frozen=True)
class SynthesisConfig:
    regime: RegimeParams = field(default_factory=RegimeParams)
    rd: RdParams = field(default_factory=RdParams)
    cbr_psnr_penalty_db: float = 2.35


@dataclass(frozen=True)
class BenchConfig:
    calls: int = MIN_BENCH_CALLS
    horizons: tuple[int, ...] = (1, 5, 10)


@dataclass(frozen=True)
class ExperimentConfig:
    controllers: tuple[str, ...]
    seeds: tuple[int, ...]
    duration_s: int = 600
    train_seconds: int = 3600
    network_trace: Path | None = None
    video_trace: Path | None = None
    training_trace: Path | None = None
    decode_policy: str = 'independent'
    grids: GridConfig = field(default_factory=GridConfig)
    scheduler: SchedulerConfig = field(default_factory=SchedulerConfig)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    calibration: BaselineCalibration = field(default_factory=BaselineCalibration)
    bench: BenchConfig = field(default_factory=BenchConfig)

    @property
    def predictor_config(self) -> PredictorConfig:
        return PredictorConfig(
            input_length=self.scheduler.input_length,
            horizon=self.scheduler.horizon,
            bandwidth_grid=self.grids.bandwidth_grid,
            loss_grid=self.grids.loss_grid,
            schedule=self.synthesis.regime.schedule,
            ewma_smoothing=self.scheduler.ewma_smoothing,
        )

    def to_dict(self) -> dict[str, Any]:
        """The resolved config, defaults included; `parse_config` accepts it back."""
        data = json.loads(json.dumps(asdict(self), default=str))
        return {key: value for key, value in data.items() if value is not None}


def _build(field_name: str, factory: Callable[[], Any]) -> Any:
    try:
        return factory()
    except (LabError, TypeError, ValueError) as e:
        raise ConfigError(field_name, str(e)) from e


def _existing_path(field_name: str, value: str | None) -> Path | None:
    if value is None:
        return None
    path = Path(value)
    if not path.is_file():
        raise ConfigError(field_name, f'file {value} does not exist')
    return path


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    error = jsonschema.exceptions.best_match(
        jsonschema.Draft202012Validator(CONFIG_SCHEMA).iter_errors(data)
    )
    if error is not None:
        raise ConfigError('.'.join(str(p) for p in error.absolute_path) or '<root>', error.message)

    grids = data.get('grids', {})
    scheduler = dict(data.get('scheduler', {}))
    synthesis = dict(data.get('synthesis', {}))
    calibration = data.get('calibration', {})
    bench = dict(data.get('bench', {}))

    weights = scheduler.pop('qoe_weights', {})
    regime = synthesis.pop('regime', {})
    rd = synthesis.pop('rd', {})
    config = ExperimentConfig(
        controllers=tuple(data['controllers']),
        seeds=tuple(data['seeds']),
        duration_s=data.get('duration_s', 600),
        train_seconds=data.get('train_seconds', 3600),
        network_trace=_existing_path('network_trace', data.get('network_trace')),
        video_trace=_existing_path('video_trace', data.get('video_trace')),
        training_trace=_existing_path('training_trace', data.get('training_trace')),
        decode_policy=data.get('decode_policy', 'independent'),
        grids=_build('grids', lambda: GridConfig(**grids)),
        scheduler=SchedulerConfig(
            qoe_weights=_build('scheduler.qoe_weights', lambda: QoeWeights(**weights)),
            **scheduler,
        ),
        synthesis=SynthesisConfig(
            regime=_build('synthesis.regime', lambda: RegimeParams.from_dict(regime)),
            rd=_build('synthesis.rd', lambda: RdParams.from_dict(rd)),
            **synthesis,
        ),
        calibration=_build('calibration', lambda: BaselineCalibration.from_dict(calibration)),
        bench=BenchConfig(
            calls=bench.get('calls', MIN_BENCH_CALLS),
            horizons=tuple(bench.get('horizons', BenchConfig.horizons)),
        ),
    )
    # Grid and horizon consistency is checked by the objects built from them
    _build('grids', lambda: config.grids.bandwidth_grid)
    _build('grids', lambda: config.grids.loss_grid)
    _build('scheduler', lambda: config.predictor_config)
    return config


def load_config(path: Path | str) -> ExperimentConfig:
    try:
        with open(path, encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError('<file>', f'cannot read {path}: {e.strerror}') from e
    except json.JSONDecodeError as e:
        raise ConfigError('<file>', f'not valid JSON: {e}') from e
    return parse_config(data)
