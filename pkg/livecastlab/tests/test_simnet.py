from __future__ import annotations

from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from livecastlab.baselines import Controller
from livecastlab.baselines.predictive import BarocController
from livecastlab.crf_model import CrfBitrateModel
from livecastlab.predictor import OraclePredictor, PredictorConfig
from livecastlab.scheduler import Decision
from livecastlab.simnet import (
    LOSS_SLOTS,
    FrameOutcome,
    FramePackets,
    LossDraws,
    SecondReport,
    build_frames,
    decode_accounting,
    packetize,
    shed_frames,
    stream_rng,
    transmit_and_recover,
    trim_frame_rate,
)
from livecastlab.simnet.exceptions import DurationMismatchError, UnknownDecodePolicyError
from livecastlab.simnet.experiment import run_experiment, simulate_second
from livecastlab.simnet.io import REPORT_COLUMNS, report_row, write_reports
from livecastlab.tests.factories import frame_sizes
from livecastlab.traces import I_FRAME, P_FRAME


class FixedController(Controller):
    """Sends the same decision every second and remembers what it was shown."""

    name = 'fixed'
    label = 'Fixed'

    def __init__(self, decision: Decision):
        self.decision = decision
        self.calls: list[tuple[int, int, int]] = []
        self.reports: list[SecondReport] = []

    @classmethod
    def from_context(cls, context):
        return cls(Decision.cold_start())

    def decide(self, t, history, crf_model, crf_prev):
        self.calls.append((t, len(history), crf_prev))
        return self.decision

    def observe(self, report):
        self.reports.append(report)


def frames_of(*data_packets: int, fec_ratio: float = 0.0) -> list[FramePackets]:
    return [
        FramePackets(
            index=i,
            frame_type=I_FRAME if i == 0 else P_FRAME,
            data_packets=u,
            parity_packets=int(np.ceil(fec_ratio * u)),
        )
        for i, u in enumerate(data_packets)
    ]


@pytest.mark.parametrize(
    ('size', 'packets'), [(0, 0), (1, 1), (12_000, 1), (12_001, 2), (360_000, 30)]
)
def test_packetize(size, packets):
    assert packetize(size) == packets


def test_build_frames(crf_record_factory):
    sizes = (48_000,) + (0,) * 9 + (12_001,) * 50
    frames = build_frames(crf_record_factory(frame_sizes_bits=sizes), fec_ratio=0.5)
    assert len(frames) == 51
    assert frames[0] == FramePackets(0, I_FRAME, data_packets=4, parity_packets=2)
    assert frames[1] == FramePackets(10, P_FRAME, data_packets=2, parity_packets=1)


def test_trim_frame_rate_keeps_i_frame():
    frames = frames_of(*[3] * 60)
    trimmed = trim_frame_rate(frames, 20, stream_rng(1, 0, 0))
    assert len(trimmed) == 20
    assert trimmed[0].frame_type == I_FRAME
    assert [f.index for f in trimmed] == sorted(f.index for f in trimmed)
    assert trimmed == trim_frame_rate(frames, 20, stream_rng(1, 0, 0))
    assert trim_frame_rate(frames, 60, stream_rng(1, 0, 0)) == frames
    assert trim_frame_rate(frames, 0, stream_rng(1, 0, 0)) == []


def test_shed_frames_within_budget():
    frames = frames_of(*[2] * 60, fec_ratio=0.5)
    # 60 frames of 3 packets at 12 kbit each
    assert shed_frames(frames, 2_160, stream_rng(1, 0, 1)) == frames


def test_shed_frames_zero_budget():
    assert shed_frames(frames_of(*[2] * 60), 0, stream_rng(1, 0, 1)) == []


def test_shed_frames_reproducible():
    frames = frames_of(*[4] + [1] * 59)
    budget = 30 * 12 * np.mean([f.total_packets for f in frames])
    retained = shed_frames(frames, budget, stream_rng(3, 7, 1))
    assert retained == shed_frames(frames, budget, stream_rng(3, 7, 1))
    assert sum(f.total_packets for f in retained) * 12_000 <= budget * 1000
    assert retained[0].frame_type == I_FRAME
    assert len(retained) < len(frames)


def test_shed_frames_drops_i_frame_last():
    frames = frames_of(10, 1, 1)
    retained = shed_frames(frames, 12 * 5, stream_rng(0, 0, 1))
    assert retained == []
    assert shed_frames(frames, 12 * 10, stream_rng(0, 0, 1)) == frames[:1]


def test_loss_draws_are_positional():
    draws = LossDraws(seed=5, t=10)
    assert np.array_equal(draws.for_frame(3, 8), LossDraws(seed=5, t=10).for_frame(3, 8))
    # A longer frame sees the same draws on its first slots
    assert np.array_equal(draws.for_frame(3, 20)[:8], draws.for_frame(3, 8))
    assert not np.array_equal(draws.for_frame(3, 8), LossDraws(seed=5, t=11).for_frame(3, 8))

    long = draws.for_frame(0, LOSS_SLOTS + 10)
    assert long.shape == (LOSS_SLOTS + 10,)
    assert np.array_equal(long[:LOSS_SLOTS], draws.for_frame(0, LOSS_SLOTS))


def test_transmit_without_loss(mocker):
    draws = mocker.Mock(spec=LossDraws)
    outcomes = transmit_and_recover(frames_of(5, 3, 3), 0.0, draws)
    assert all(outcome.delivered for outcome in outcomes)
    assert sum(outcome.lost for outcome in outcomes) == 0
    draws.for_frame.assert_not_called()


def test_transmit_without_parity_loses_frame(mocker):
    draws = mocker.Mock(spec=LossDraws)
    draws.for_frame.return_value = np.array([0.9] * 9 + [0.01])
    (outcome,) = transmit_and_recover(frames_of(10), 0.05, draws)
    assert outcome.lost_data == 1
    assert not outcome.delivered


@pytest.mark.parametrize(('losses', 'delivered'), [(0, True), (2, True), (3, False)])
def test_transmit_recovers_up_to_parity(mocker, losses, delivered):
    draws = mocker.Mock(spec=LossDraws)
    values = np.full(12, 0.9)
    values[:losses] = 0.0
    draws.for_frame.return_value = values
    (outcome,) = transmit_and_recover(frames_of(10, fec_ratio=0.2), 0.1, draws)
    draws.for_frame.assert_called_once_with(0, 12)
    assert outcome.frame.parity_packets == 2
    assert outcome.lost == losses
    assert outcome.delivered is delivered


def test_frame_outcome_counts_parity_losses():
    frame = FramePackets(0, I_FRAME, data_packets=10, parity_packets=2)
    assert FrameOutcome(frame, lost_data=1, lost_parity=1).delivered
    assert not FrameOutcome(frame, lost_data=1, lost_parity=2).delivered


def test_decode_all_delivered():
    assert decode_accounting([True] * 60, [I_FRAME] + [P_FRAME] * 59) == 60


def test_decode_i_frame_lost():
    types = [I_FRAME] + [P_FRAME] * 59
    assert decode_accounting([False] + [True] * 59, types) == 0
    assert decode_accounting([False] + [True] * 59, types, 'cascade') == 0


def test_decode_policies():
    delivered = [True] * 10 + [False] + [True] * 49
    types = [I_FRAME] + [P_FRAME] * 59
    assert decode_accounting(delivered, types, 'independent') == 59
    assert decode_accounting(delivered, types, 'cascade') == 10


def test_decode_without_frames():
    assert decode_accounting([], []) == 0


def test_decode_unknown_policy():
    with pytest.raises(UnknownDecodePolicyError, match="'gop'"):
        decode_accounting([True], [I_FRAME], 'gop')


def test_second_report_ratios(decision):
    report = SecondReport(
        t=0,
        decision=decision,
        bitrate_kbps=1_000,
        sent_data=90,
        sent_parity=10,
        lost=8,
        recovered=6,
        frames_offered=60,
        frames_delivered=58,
        psnr_db=38.0,
        stall=False,
    )
    assert report.recovery_ratio == 0.75
    assert report.parity_utility == 0.6
    assert report.loss_ratio == 0.08

    lossless = replace(report, lost=0, recovered=0, sent_parity=0)
    assert lossless.recovery_ratio == 1.0
    assert lossless.parity_utility == 0.0


def test_simulate_lossless_second(network_sample_factory, crf_record_factory, decision_factory):
    sample = network_sample_factory(t=5, bandwidth_kbps=15_000, loss_ratio=0.0)
    record = crf_record_factory(bitrate_kbps=3_000, psnr_db=42.0)
    report = simulate_second(sample, record, decision_factory(frame_rate=45), seed=1)
    assert report.frames_offered == 45
    assert report.frames_delivered == 45
    assert report.lost == report.recovered == report.sent_parity == 0
    assert report.recovery_ratio == 1.0
    assert report.parity_utility == 0.0
    assert report.psnr_db == 42.0
    assert not report.stall


def test_simulate_second_conservation(network_sample_factory, crf_record_factory):
    sample = network_sample_factory(t=9, bandwidth_kbps=5_000, loss_ratio=0.08)
    record = crf_record_factory(bitrate_kbps=4_000)
    for fec_ratio in (0.0, 0.1, 0.5):
        decision = Decision(crf=36, frame_rate=60, fec_ratio=fec_ratio)
        report = simulate_second(sample, record, decision, seed=4)
        assert report.recovered <= report.lost <= report.sent_data + report.sent_parity
        assert report.frames_delivered <= report.frames_offered
        assert (report.sent_data + report.sent_parity) * 12 <= sample.bandwidth_kbps


def test_simulate_stalled_second(network_sample_factory, crf_record_factory, decision):
    sample = network_sample_factory(bandwidth_kbps=0.0)
    report = simulate_second(sample, crf_record_factory(), decision, seed=1)
    assert report.stall
    assert report.psnr_db == 0.0
    assert report.sent_data == 0


def test_delivery_is_monotone_in_fec_ratio(network_trace_factory, video_trace_factory):
    network = network_trace_factory([(100_000, 0.1)] * 30)
    video = video_trace_factory(30)
    delivered = []
    for fec_ratio in (0.0, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0):
        controller = FixedController(Decision(crf=31, frame_rate=60, fec_ratio=fec_ratio))
        reports = run_experiment(network, video, controller, seed=6)
        delivered.append([report.frames_delivered for report in reports])
    for lower, higher in zip(delivered, delivered[1:]):
        assert all(a <= b for a, b in zip(lower, higher, strict=True))
    assert sum(delivered[-1]) > sum(delivered[0])


def test_run_experiment_deterministic(tmp_path, network_trace_factory, video_trace_factory):
    rng = np.random.default_rng(0)
    network = network_trace_factory(
        zip(rng.uniform(2_000, 12_000, 60), rng.choice([0.0, 0.01, 0.1], 60), strict=True)
    )
    video = video_trace_factory(60)

    for name in ('a.csv', 'b.csv'):
        controller = FixedController(Decision(crf=36, frame_rate=50, fec_ratio=0.2))
        reports = run_experiment(network, video, controller, seed=12)
        write_reports([report_row(report) for report in reports], tmp_path / name)
    assert (tmp_path / 'a.csv').read_bytes() == (tmp_path / 'b.csv').read_bytes()
    assert list(pd.read_csv(tmp_path / 'a.csv').columns) == REPORT_COLUMNS


def test_run_experiment_feeds_controller_and_model(
    network_trace_factory, video_trace_factory, network_sample_factory
):
    network = network_trace_factory([(10_000, 0.0)] * 5, start_t=100)
    video = video_trace_factory(5, start_t=100)
    warmup = [network_sample_factory(t=t) for t in (98, 99)]
    controller = FixedController(Decision(crf=41, frame_rate=60, fec_ratio=0.0))
    crf_model = CrfBitrateModel()

    reports = run_experiment(network, video, controller, seed=0, warmup=warmup, crf_model=crf_model)
    assert controller.calls == [
        (100, 2, 51),
        (101, 3, 41),
        (102, 4, 41),
        (103, 5, 41),
        (104, 6, 41),
    ]
    assert controller.reports == reports
    assert [t for t, _ in crf_model.queue(41)] == [100, 101, 102, 103, 104]
    assert crf_model.queue(41)[0][1] == video[0][41].bitrate_kbps


def test_run_experiment_duration_mismatch(network_trace_factory, video_trace_factory):
    with pytest.raises(DurationMismatchError, match='covers 3 s'):
        run_experiment(
            network_trace_factory([(10_000, 0.0)] * 3),
            video_trace_factory(4),
            FixedController(Decision.cold_start()),
            seed=0,
        )


def test_oracle_scheduler_protects_the_anomalous_second(
    network_trace_factory, video_trace_factory
):
    rows = [(12_000, 0.1) if t == 72 else (12_000, 0.0) for t in range(80)]
    network = network_trace_factory(rows)
    video = video_trace_factory(80)
    config = PredictorConfig(input_length=10, horizon=1)
    controller = BarocController(OraclePredictor(network, config))

    reports = run_experiment(network, video, controller, seed=0)
    protected = [report.t for report in reports if report.decision.fec_ratio > 0]
    assert protected == [72]

    # The same second sent without parity, over the same channel draws
    decision = reports[72].decision
    unprotected = replace(decision, fec_ratio=0.0)
    with_fec = without_fec = 0
    for seed in range(20):
        record = video[72][decision.crf]
        with_fec += simulate_second(network[72], record, decision, seed).frames_delivered
        without_fec += simulate_second(network[72], record, unprotected, seed).frames_delivered
    assert with_fec > without_fec


def test_frame_sizes_helper_sums_to_bitrate():
    assert sum(frame_sizes(3_000)) == 3_000_000
