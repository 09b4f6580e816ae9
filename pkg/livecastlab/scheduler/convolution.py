"""
Distribution algebra of a single scheduling step.

A predicted (bandwidth, loss) pair becomes a set of bitrate atoms: every combination of a
bandwidth value (with the frame rate it affords) and an FEC ratio leaves some bitrate for media,
with the product of their probabilities. CRFs are then scored against those atoms, and the
chosen CRF is backtracked to the atom most likely to carry it through both bandwidth and loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math
from typing import TYPE_CHECKING

import numpy as np

from livecastlab.distributions import Pmf, pmf_transform
from livecastlab.scheduler import (
    FEC_RATIO_GRID,
    FRAME_RATE_GRID,
    MTU_KBIT,
    BitrateAtom,
)
from livecastlab.scheduler.exceptions import TotalLossError
from livecastlab.traces import MAX_FRAME_RATE

if TYPE_CHECKING:
    from collections.abc import Iterator

    from livecastlab.crf_model import CrfBitrateModel

# Absorbs float error in α·u so exact ratios like 0.02/0.98·49 do not round up a packet
PARITY_TOLERANCE = 1e-9


def min_fec_ratio(loss_ratio: float) -> float:
    """Smallest α such that ⌈α·u⌉ parity packets cover the expected loss of u data packets."""
    if loss_ratio >= 1:
        raise TotalLossError
    return loss_ratio / (1 - loss_ratio)


def parity_packets(fec_ratio: float, data_packets: int) -> int:
    if data_packets <= 0 or fec_ratio <= 0:
        return 0
    return math.ceil(fec_ratio * data_packets - PARITY_TOLERANCE)


def fec_ratio_distribution(loss: Pmf) -> Pmf:
    # Round up so the snapped ratio never falls below the minimum for its loss value
    return pmf_transform(loss, min_fec_ratio, FEC_RATIO_GRID, rounding='ceil')


def max_frame_rate(bandwidth_kbps: float, max_frame_rate: int = MAX_FRAME_RATE) -> int:
    """Largest γ with w − γ·MTU > 0, capped at the encoder frame rate."""
    if bandwidth_kbps <= 0:
        return 0
    return min(max_frame_rate, math.ceil(bandwidth_kbps / MTU_KBIT) - 1)


@dataclass(frozen=True, eq=False)
class FrameRates:
    """Frame rate afforded by each bandwidth value in the support of a bandwidth PMF."""

    bandwidths: np.ndarray
    frame_rates: np.ndarray
    probabilities: np.ndarray

    def __len__(self) -> int:
        return self.bandwidths.size

    @cached_property
    def pmf(self) -> Pmf:
        weights = np.bincount(
            self.frame_rates, weights=self.probabilities, minlength=FRAME_RATE_GRID.size
        )
        return Pmf.normalized(FRAME_RATE_GRID, weights)


def frame_rate_distribution(bandwidth: Pmf) -> FrameRates:
    support = bandwidth.support
    bandwidths = bandwidth.grid.values[support]
    return FrameRates(
        bandwidths=bandwidths,
        frame_rates=np.array([max_frame_rate(w) for w in bandwidths], dtype=np.int64),
        probabilities=bandwidth.probabilities[support],
    )


@dataclass(frozen=True, eq=False)
class BitrateAtoms:
    """Columnar set of `BitrateAtom`s, bandwidth-major in grid order."""

    bitrates: np.ndarray
    probabilities: np.ndarray
    bandwidths: np.ndarray
    frame_rates: np.ndarray
    fec_ratios: np.ndarray = field(repr=False)
    # P(w)·P(A ≤ α): the atom's bandwidth occurs and its FEC ratio recovers the loss
    coverages: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return self.bitrates.size

    @cached_property
    def backtrack_weights(self) -> np.ndarray:
        return self.probabilities if self.coverages is None else self.coverages

    def __getitem__(self, index: int) -> BitrateAtom:
        return BitrateAtom(
            bitrate_kbps=float(self.bitrates[index]),
            probability=float(self.probabilities[index]),
            bandwidth_kbps=float(self.bandwidths[index]),
            frame_rate=int(self.frame_rates[index]),
            fec_ratio=float(self.fec_ratios[index]),
        )

    def __iter__(self) -> Iterator[BitrateAtom]:
        return (self[index] for index in range(len(self)))

    @cached_property
    def feasible(self) -> np.ndarray:
        return self.bitrates > 0


def available_bitrate_distribution(
    bandwidth: Pmf, fec: Pmf, frame_rates: FrameRates | None = None
) -> BitrateAtoms:
    """
    Bitrate left for media under every (bandwidth, FEC ratio) combination.

    Each atom has b = (w − γ(w)·MTU) / (α + 1) and probability P(w)·P(α). Combinations leaving
    no bitrate are kept with b = 0 so the atom probabilities still sum to one.

    A ratio α recovers every loss whose minimal ratio is at most α, so each atom also carries
    P(w)·P(A ≤ α), the weight backtracking uses to pick the ratio to send.
    """
    if frame_rates is None:
        frame_rates = frame_rate_distribution(bandwidth)
    fec_support = fec.support
    alphas = fec.grid.values[fec_support]
    n_alphas = alphas.size

    bandwidths = np.repeat(frame_rates.bandwidths, n_alphas)
    gammas = np.repeat(frame_rates.frame_rates, n_alphas)
    fec_ratios = np.tile(alphas, len(frame_rates))
    probabilities = np.outer(frame_rates.probabilities, fec.probabilities[fec_support]).ravel()
    coverages = np.outer(
        frame_rates.probabilities, np.cumsum(fec.probabilities[fec_support])
    ).ravel()
    bitrates = np.maximum((bandwidths - gammas * MTU_KBIT) / (fec_ratios + 1), 0.0)

    return BitrateAtoms(
        bitrates=bitrates,
        probabilities=probabilities,
        bandwidths=bandwidths,
        frame_rates=gammas,
        fec_ratios=fec_ratios,
        coverages=coverages,
    )


@dataclass(frozen=True, eq=False)
class AtomScores:
    """Per-CRF, per-atom expected reward P(b)·P(M_c ≤ b)·E[M_c]."""

    crfs: tuple[int, ...]
    matrix: np.ndarray
    # P(M_c ≤ b)·E[M_c], zero for infeasible atoms
    rewards: np.ndarray = field(repr=False)

    @cached_property
    def totals(self) -> np.ndarray:
        return self.matrix.sum(axis=1)

    def row(self, crf: int) -> np.ndarray:
        return self.matrix[self.crfs.index(crf)]

    def best_crf(self) -> int:
        # Ties go to the larger CRF
        return max(zip(self.totals.tolist(), self.crfs, strict=True))[1]


def score_atoms(atoms: BitrateAtoms, model: CrfBitrateModel) -> AtomScores:
    crfs = model.crfs
    rewards = np.empty((len(crfs), len(atoms)))
    for row, crf in enumerate(crfs):
        rewards[row] = model.cdf_below(crf, atoms.bitrates) * model.expected_bitrate(crf)
    rewards[:, ~atoms.feasible] = 0.0
    return AtomScores(crfs=crfs, matrix=atoms.probabilities * rewards, rewards=rewards)


def select_crf(
    atoms: BitrateAtoms, model: CrfBitrateModel, *, scores: AtomScores | None = None
) -> int:
    return (scores or score_atoms(atoms, model)).best_crf()


def backtrack_decision(
    crf: int, atoms: BitrateAtoms, model: CrfBitrateModel, *, scores: AtomScores | None = None
) -> BitrateAtom:
    """
    Return the most confident atom for `crf`.

    Atoms are weighted by their backtrack weight (the probability that their bandwidth occurs
    and their FEC ratio recovers the loss) times the reward of `crf` at their bitrate.
    Among equally scored atoms the larger bitrate wins, then the larger frame rate, then the
    smaller FEC ratio.
    """
    scores = scores or score_atoms(atoms, model)
    row = atoms.backtrack_weights * scores.rewards[scores.crfs.index(crf)]
    tied = np.flatnonzero(row == row.max())
    order = np.lexsort((atoms.fec_ratios[tied], -atoms.frame_rates[tied], -atoms.bitrates[tied]))
    return atoms[int(tied[order[0]])]
