from __future__ import annotations

import logging
from typing import TYPE_CHECKING

from livecastlab.crf_model import CrfBitrateModel
from livecastlab.scheduler import MAX_CRF
from livecastlab.simnet import (
    SHED_STREAM,
    TRIM_STREAM,
    DecodePolicy,
    LossDraws,
    SecondReport,
    build_frames,
    decode_accounting,
    shed_frames,
    stream_rng,
    transmit_and_recover,
    trim_frame_rate,
)
from livecastlab.simnet.exceptions import DurationMismatchError

if TYPE_CHECKING:
    from collections.abc import Iterable

    from livecastlab.baselines import Controller
    from livecastlab.scheduler import Decision
    from livecastlab.traces import CrfRecord, NetworkSample, NetworkTrace, VideoTrace

logger = logging.getLogger(__name__)


def simulate_second(
    sample: NetworkSample,
    record: CrfRecord,
    decision: Decision,
    seed: int,
    decode_policy: DecodePolicy = 'independent',
) -> SecondReport:
    """Deliver one second of the chosen CRF over the actual network conditions of `sample`."""
    t = sample.t
    offered = trim_frame_rate(
        build_frames(record, decision.fec_ratio),
        decision.frame_rate,
        stream_rng(seed, t, TRIM_STREAM),
    )
    retained = shed_frames(offered, sample.bandwidth_kbps, stream_rng(seed, t, SHED_STREAM))
    outcomes = transmit_and_recover(retained, sample.loss_ratio, LossDraws(seed, t))

    delivered = decode_accounting(
        [outcome.delivered for outcome in outcomes],
        [outcome.frame.frame_type for outcome in outcomes],
        decode_policy,
    )
    stall = delivered == 0
    return SecondReport(
        t=t,
        decision=decision,
        bitrate_kbps=record.bitrate_kbps,
        sent_data=sum(outcome.frame.data_packets for outcome in outcomes),
        sent_parity=sum(outcome.frame.parity_packets for outcome in outcomes),
        lost=sum(outcome.lost for outcome in outcomes),
        recovered=sum(outcome.lost_data for outcome in outcomes if outcome.delivered),
        frames_offered=len(offered),
        frames_delivered=delivered,
        psnr_db=0.0 if stall else record.psnr_db * delivered / decision.frame_rate,
        stall=stall,
    )


def run_experiment(
    network: NetworkTrace,
    video: VideoTrace,
    controller: Controller,
    seed: int,
    *,
    warmup: Iterable[NetworkSample] = (),
    crf_model: CrfBitrateModel | None = None,
    decode_policy: DecodePolicy = 'independent',
) -> list[SecondReport]:
    """
    Run a controller over a network trace second by second.

    The controller decides each second from the samples before it (starting with `warmup`),
    and the CRF model learns the realized bitrate of every chosen CRF.
    """
    if len(network) != len(video):
        raise DurationMismatchError(len(network), len(video))
    crf_model = crf_model if crf_model is not None else CrfBitrateModel()

    history = list(warmup)
    crf_prev = MAX_CRF
    reports = []
    for sample, second in zip(network, video, strict=True):
        decision = controller.decide(sample.t, history, crf_model, crf_prev)
        record = second[decision.crf]
        report = simulate_second(sample, record, decision, seed, decode_policy)

        crf_model.observe(decision.crf, record.bitrate_kbps, sample.t)
        controller.observe(report)
        history.append(sample)
        crf_prev = decision.crf
        reports.append(report)

    logger.debug(
        'Simulated %s seconds with %s (seed %s): %s stalls',
        len(reports),
        controller.name,
        seed,
        sum(report.stall for report in reports),
    )
    return reports
