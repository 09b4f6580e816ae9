"""Multi-step quality planning by dynamic programming over per-step CRF candidates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from livecastlab.predictor import MAX_HORIZON
from livecastlab.scheduler import MAX_CRF, BitrateAtom, Decision, QoeWeights
from livecastlab.scheduler.convolution import (
    available_bitrate_distribution,
    backtrack_decision,
    fec_ratio_distribution,
    frame_rate_distribution,
    score_atoms,
)
from livecastlab.scheduler.exceptions import EmptyPredictionsError, HorizonError
from livecastlab.traces import MAX_FRAME_RATE

if TYPE_CHECKING:
    from collections.abc import Sequence

    from livecastlab.crf_model import CrfBitrateModel
    from livecastlab.predictor import PredictionStep

DEFAULT_WEIGHTS = QoeWeights()


def qoe_step(
    frame_rate: int,
    crf: int,
    crf_prev: int,
    weights: QoeWeights = DEFAULT_WEIGHTS,
    *,
    max_frame_rate: int = MAX_FRAME_RATE,
    max_crf: int = MAX_CRF,
) -> float:
    return (
        weights.frame_rate * frame_rate / max_frame_rate
        - weights.quality * crf / max_crf
        - weights.smoothness * abs(crf - crf_prev) / max_crf
    )


def step_candidates(step: PredictionStep, model: CrfBitrateModel) -> dict[int, BitrateAtom]:
    """
    CRFs no better than the single-step optimum, each with its backtracked atom.

    Keys are in ascending CRF order.
    """
    atoms = available_bitrate_distribution(
        step.bandwidth, fec_ratio_distribution(step.loss), frame_rate_distribution(step.bandwidth)
    )
    scores = score_atoms(atoms, model)
    best = scores.best_crf()
    return {
        crf: backtrack_decision(crf, atoms, model, scores=scores)
        for crf in scores.crfs
        if crf >= best
    }


@dataclass(frozen=True)
class HorizonPlan:
    decisions: tuple[Decision, ...]
    total_qoe: float


def _decision(crf: int, atom: BitrateAtom) -> Decision:
    return Decision(
        crf=crf,
        frame_rate=atom.frame_rate,
        fec_ratio=atom.fec_ratio,
        predicted_bitrate_kbps=atom.bitrate_kbps,
    )


def plan_horizon(
    predictions: Sequence[PredictionStep],
    model: CrfBitrateModel,
    crf_prev: int,
    weights: QoeWeights = DEFAULT_WEIGHTS,
) -> HorizonPlan:
    if not predictions:
        raise EmptyPredictionsError
    if len(predictions) > MAX_HORIZON:
        raise HorizonError(f'Horizon {len(predictions)} exceeds the maximum of {MAX_HORIZON}')

    # Predictors may hand out the same step object for several seconds
    by_step: dict[int, dict[int, BitrateAtom]] = {}
    layers = []
    for step in predictions:
        if id(step) not in by_step:
            by_step[id(step)] = step_candidates(step, model)
        layers.append(by_step[id(step)])

    values = [
        {
            crf: (qoe_step(atom.frame_rate, crf, crf_prev, weights), None)
            for crf, atom in layers[0].items()
        }
    ]
    for layer in layers[1:]:
        previous = values[-1]
        current: dict[int, tuple[float, int | None]] = {}
        for crf, atom in layer.items():
            best_value, best_prev = None, None
            # Descending, so equal cumulative QoE keeps the larger predecessor CRF
            for prev in sorted(previous, reverse=True):
                value = previous[prev][0] + qoe_step(atom.frame_rate, crf, prev, weights)
                if best_value is None or value > best_value:
                    best_value, best_prev = value, prev
            current[crf] = (best_value, best_prev)
        values.append(current)

    last = values[-1]
    crf = max(last, key=lambda c: (last[c][0], c))
    total = last[crf][0]
    path = [crf]
    for layer_values in reversed(values[1:]):
        crf = layer_values[crf][1]
        path.append(crf)
    path.reverse()

    return HorizonPlan(
        decisions=tuple(_decision(c, layer[c]) for c, layer in zip(path, layers, strict=True)),
        total_qoe=total,
    )


def solve_horizon(
    predictions: Sequence[PredictionStep],
    model: CrfBitrateModel,
    crf_prev: int,
    weights: QoeWeights = DEFAULT_WEIGHTS,
) -> Decision:
    """Decision for the first predicted second along the best plan."""
    return plan_horizon(predictions, model, crf_prev, weights).decisions[0]
