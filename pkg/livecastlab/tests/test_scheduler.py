from __future__ import annotations

from fractions import Fraction
import math

import numpy as np
import pytest

from livecastlab.crf_model import CrfBitrateModel
from livecastlab.crf_model.mixture import GaussianMixture
from livecastlab.distributions import Pmf
from livecastlab.predictor import LOSS_GRID
from livecastlab.scheduler import FEC_RATIO_GRID, BitrateAtom, Decision, QoeWeights
from livecastlab.scheduler.convolution import (
    BitrateAtoms,
    available_bitrate_distribution,
    backtrack_decision,
    fec_ratio_distribution,
    frame_rate_distribution,
    max_frame_rate,
    min_fec_ratio,
    parity_packets,
    score_atoms,
    select_crf,
)
from livecastlab.scheduler.exceptions import (
    InvalidDecisionError,
    InvalidQoeWeightsError,
    TotalLossError,
)
from livecastlab.traces import CRF_SET


def atoms_of(*atoms: tuple[float, float, int, float]) -> BitrateAtoms:
    """Atoms from (bitrate, probability, frame rate, fec ratio) tuples."""
    bitrates, probabilities, frame_rates, fec_ratios = (np.array(c) for c in zip(*atoms))
    return BitrateAtoms(
        bitrates=bitrates.astype(np.float64),
        probabilities=probabilities.astype(np.float64),
        bandwidths=np.zeros(len(atoms)),
        frame_rates=frame_rates.astype(np.int64),
        fec_ratios=fec_ratios.astype(np.float64),
    )


@pytest.fixture()
def known_model() -> CrfBitrateModel:
    return CrfBitrateModel(
        {
            26: GaussianMixture.single(8_000, 1_500),
            31: GaussianMixture.single(5_000, 1_000),
            36: GaussianMixture.single(3_000, 600),
            41: GaussianMixture.single(1_800, 350),
            46: GaussianMixture.single(1_000, 200),
            51: GaussianMixture.single(500, 100),
        }
    )


@pytest.mark.parametrize(
    ('kwargs', 'match'),
    [
        ({'crf': 30}, 'CRF 30'),
        ({'frame_rate': 61}, 'Frame rate 61'),
        ({'frame_rate': -1}, 'Frame rate -1'),
        ({'fec_ratio': -0.1}, 'FEC ratio'),
    ],
)
def test_decision_invalid(decision_factory, kwargs, match):
    with pytest.raises(InvalidDecisionError, match=match):
        decision_factory(**kwargs)


def test_decision_cold_start():
    assert Decision.cold_start() == Decision(crf=51, frame_rate=60, fec_ratio=0.0)


def test_qoe_weights_invalid(qoe_weights_factory):
    with pytest.raises(InvalidQoeWeightsError):
        qoe_weights_factory(smoothness=1.5)


@pytest.mark.parametrize(('loss', 'fec_ratio'), [(0.0, 0.0), (0.5, 1.0), (0.2, 0.25)])
def test_min_fec_ratio(loss, fec_ratio):
    assert min_fec_ratio(loss) == pytest.approx(fec_ratio)


def test_min_fec_ratio_total_loss():
    with pytest.raises(TotalLossError, match='Total loss uncoverable'):
        min_fec_ratio(1.0)


def _recovers(u: int, p: int, loss: Fraction) -> bool:
    return math.floor((u + p) * (1 - loss)) >= u


def _minimal_parity(u: int, loss: Fraction) -> int:
    """Smallest p with enough surviving packets, by galloping then bisecting over p."""
    high = 1
    while not _recovers(u, high - 1, loss):
        high *= 2
    low = 0
    while low < high - 1:
        middle = (low + high) // 2
        if _recovers(u, middle - 1, loss):
            high = middle
        else:
            low = middle
    return high - 1


def test_parity_is_minimal_for_every_grid_loss():
    for k in range(LOSS_GRID.size - 1):
        loss = LOSS_GRID.value(k)
        fec_ratio = min_fec_ratio(loss)
        exact = Fraction(k, 50)
        for u in range(1, 201):
            assert parity_packets(fec_ratio, u) == _minimal_parity(u, exact), (k, u)


@pytest.mark.parametrize(
    ('fec_ratio', 'data_packets', 'expected'),
    [(0.0, 10, 0), (0.1, 0, 0), (0.1, 10, 1), (0.11, 10, 2), (2.0, 7, 14)],
)
def test_parity_packets(fec_ratio, data_packets, expected):
    assert parity_packets(fec_ratio, data_packets) == expected


def test_fec_ratio_distribution():
    assert fec_ratio_distribution(Pmf.point_mass(LOSS_GRID, 0.0)) == Pmf.point_mass(
        FEC_RATIO_GRID, 0.0
    )

    probabilities = np.zeros(LOSS_GRID.size)
    probabilities[LOSS_GRID.snap_index(0.0)] = 0.7
    probabilities[LOSS_GRID.snap_index(0.5)] = 0.3
    fec = fec_ratio_distribution(Pmf(LOSS_GRID, probabilities))
    assert fec.probability(0.0) == pytest.approx(0.7)
    assert fec.probability(1.0) == pytest.approx(0.3)
    assert fec.probabilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_fec_ratio_distribution_never_rounds_below_minimum():
    for k in range(LOSS_GRID.size - 1):
        fec = fec_ratio_distribution(Pmf.point_mass(LOSS_GRID, LOSS_GRID.value(k)))
        (index,) = fec.support
        required = min_fec_ratio(LOSS_GRID.value(k))
        assert fec.grid.value(index) >= min(required, FEC_RATIO_GRID.max_value) - 1e-9


@pytest.mark.parametrize(
    ('bandwidth', 'frame_rate'),
    [(15_000, 60), (0, 0), (120, 9), (121, 10), (12, 0), (13, 1), (732, 60), (720, 59)],
)
def test_max_frame_rate(bandwidth, frame_rate):
    assert max_frame_rate(bandwidth) == frame_rate


def test_frame_rate_distribution(grid):
    bandwidth = Pmf.normalized(grid, [0.2] + [0.0] * 29 + [0.8])
    frame_rates = frame_rate_distribution(bandwidth)
    assert frame_rates.bandwidths.tolist() == [0.0, 15_000.0]
    assert frame_rates.frame_rates.tolist() == [0, 60]
    assert frame_rates.pmf.probability(0) == pytest.approx(0.2)
    assert frame_rates.pmf.probability(60) == pytest.approx(0.8)


@pytest.mark.parametrize(('fec_ratio', 'bitrate'), [(0.0, 11_280), (1.0, 5_640)])
def test_available_bitrate_point_masses(grid, fec_ratio, bitrate):
    atoms = available_bitrate_distribution(
        Pmf.point_mass(grid, 12_000), Pmf.point_mass(FEC_RATIO_GRID, fec_ratio)
    )
    assert len(atoms) == 1
    assert atoms[0] == BitrateAtom(
        bitrate_kbps=bitrate,
        probability=1.0,
        bandwidth_kbps=12_000,
        frame_rate=60,
        fec_ratio=fec_ratio,
    )


def test_available_bitrate_product_measure(grid):
    rng = np.random.default_rng(1)
    bandwidth = Pmf.normalized(grid, rng.random(grid.size))
    fec_weights = np.zeros(FEC_RATIO_GRID.size)
    fec_weights[[0, 5, 20, 100]] = [0.4, 0.3, 0.2, 0.1]
    fec = Pmf(FEC_RATIO_GRID, fec_weights)
    atoms = available_bitrate_distribution(bandwidth, fec)
    assert len(atoms) == len(bandwidth.support) * len(fec.support)
    assert atoms.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
    # Zero bandwidth leaves no bitrate, but its atoms are kept
    assert not atoms.feasible[0]
    assert atoms[0].bitrate_kbps == 0.0
    assert (atoms.bitrates >= 0).all()

    # Per bandwidth, coverage climbs to P(w) along the FEC support
    per_bandwidth = atoms.coverages.reshape(len(bandwidth.support), 4)
    assert per_bandwidth[:, 0] == pytest.approx(0.4 * bandwidth.probabilities[bandwidth.support])
    assert per_bandwidth[:, -1] == pytest.approx(bandwidth.probabilities[bandwidth.support])
    assert (np.diff(per_bandwidth, axis=1) > 0).all()


def bimodal_loss(*masses: tuple[float, float]) -> Pmf:
    weights = np.zeros(LOSS_GRID.size)
    for loss, probability in masses:
        weights[LOSS_GRID.snap_index(loss)] = probability
    return Pmf(LOSS_GRID, weights)


def test_select_crf_all_infeasible(grid, crf_model):
    atoms = available_bitrate_distribution(
        Pmf.point_mass(grid, 0), Pmf.point_mass(FEC_RATIO_GRID, 0)
    )
    scores = score_atoms(atoms, crf_model)
    assert (scores.totals == 0).all()
    assert select_crf(atoms, crf_model) == 51


def test_select_crf_saturated(known_model):
    atoms = atoms_of((1e6, 1.0, 60, 0.0))
    assert select_crf(atoms, known_model) == 26


def test_select_crf_matches_score_table(known_model):
    atoms = atoms_of((2_000, 0.2, 60, 0.5), (4_500, 0.5, 60, 0.1), (9_000, 0.3, 60, 0.0))
    table = {
        crf: sum(
            p * known_model.distribution_for(crf).cdf(b) * known_model.distribution_for(crf).mean
            for b, p in [(2_000, 0.2), (4_500, 0.5), (9_000, 0.3)]
        )
        for crf in CRF_SET
    }
    scores = score_atoms(atoms, known_model)
    for crf in CRF_SET:
        assert scores.totals[CRF_SET.index(crf)] == pytest.approx(table[crf], rel=1e-12)
    assert select_crf(atoms, known_model) == max(CRF_SET, key=lambda c: (table[c], c))

    for crf in CRF_SET:
        row = scores.row(crf)
        assert backtrack_decision(crf, atoms, known_model, scores=scores) == atoms[
            int(np.argmax(row))
        ]


def test_backtrack_single_atom(known_model):
    atoms = atoms_of((3_000, 1.0, 42, 0.3))
    assert backtrack_decision(36, atoms, known_model) == atoms[0]


def test_backtrack_ties_prefer_larger_frame_rate_then_smaller_fec(known_model):
    atoms = atoms_of(
        (4_000, 0.25, 50, 0.1),
        (4_000, 0.25, 60, 0.3),
        (4_000, 0.25, 60, 0.2),
        (4_000, 0.25, 55, 0.0),
    )
    chosen = backtrack_decision(41, atoms, known_model)
    assert (chosen.frame_rate, chosen.fec_ratio) == (60, 0.2)


def test_backtrack_ties_prefer_larger_bitrate():
    model = CrfBitrateModel({41: GaussianMixture.single(1_000, 10)})
    # Both bitrates sit so far above the mean that the CDF is exactly 1
    atoms = atoms_of((2_000, 0.5, 60, 0.0), (3_000, 0.5, 40, 0.5))
    assert backtrack_decision(41, atoms, model).bitrate_kbps == 3_000


def test_saturation_chooses_best_quality_without_parity(grid, known_model):
    atoms = available_bitrate_distribution(
        Pmf.point_mass(grid, 15_000),
        fec_ratio_distribution(Pmf.point_mass(LOSS_GRID, 0.0)),
    )
    crf = select_crf(atoms, known_model)
    assert crf == 26
    assert backtrack_decision(crf, atoms, known_model).fec_ratio == 0.0


def test_backtrack_covers_forecast_loss(grid, known_model):
    fec = fec_ratio_distribution(bimodal_loss((0.0, 0.7), (0.04, 0.3)))
    atoms = available_bitrate_distribution(Pmf.point_mass(grid, 12_000), fec)
    scores = score_atoms(atoms, known_model)
    crf = select_crf(atoms, known_model, scores=scores)
    assert crf == 26

    # Weighting by P(α) alone would send no parity
    assert atoms.fec_ratios[np.argmax(scores.row(crf))] == 0.0
    chosen = backtrack_decision(crf, atoms, known_model, scores=scores)
    assert chosen.fec_ratio == pytest.approx(0.05)
    assert chosen.fec_ratio >= min_fec_ratio(0.04)
    assert chosen.bitrate_kbps == pytest.approx(11_280 / 1.05)


def test_backtrack_skips_parity_that_starves_the_crf(grid, known_model):
    fec = fec_ratio_distribution(bimodal_loss((0.0, 0.9), (0.5, 0.1)))
    atoms = available_bitrate_distribution(Pmf.point_mass(grid, 12_000), fec)
    crf = select_crf(atoms, known_model)
    assert crf == 26
    # α = 1 halves the bitrate to 5640, far below the 8000 kbps the CRF needs
    assert backtrack_decision(crf, atoms, known_model).fec_ratio == 0.0
