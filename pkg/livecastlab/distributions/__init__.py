"""
Discrete probability mass functions on uniform value grids.

Every forecast and every intermediate quantity of the scheduler is a `Pmf`. Grids and PMFs are
immutable once built, and all operations here are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import logging
import math
from typing import TYPE_CHECKING, Any, Literal

import numpy as np

from livecastlab.distributions.exceptions import (
    EmptySampleError,
    GridError,
    GridMismatchError,
    InvalidPmfError,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9
# Slack used when comparing a transformed value against grid points
SNAP_TOLERANCE = 1e-9

Rounding = Literal['nearest', 'ceil']


@dataclass(frozen=True)
class Grid:
    min_value: float
    max_value: float
    interval: float

    def __post_init__(self):
        if not self.interval > 0:
            raise GridError(f'Grid interval must be positive, got {self.interval}')
        if not self.max_value > self.min_value:
            raise GridError(
                f'Grid max_value ({self.max_value}) must exceed min_value ({self.min_value})'
            )
        steps = (self.max_value - self.min_value) / self.interval
        if abs(steps - round(steps)) > NORMALIZATION_TOLERANCE * max(1.0, steps):
            raise GridError(
                f'Grid span {self.max_value - self.min_value} is not a multiple of '
                f'interval {self.interval}'
            )

    @cached_property
    def size(self) -> int:
        return round((self.max_value - self.min_value) / self.interval) + 1

    @cached_property
    def values(self) -> np.ndarray:
        values = self.min_value + self.interval * np.arange(self.size, dtype=np.float64)
        values.flags.writeable = False
        return values

    def value(self, index: int) -> float:
        return float(self.values[index])

    def snap_index(self, x: float) -> int:
        """Return the index of the grid point nearest to x, ties toward +inf, clamped."""
        position = math.floor((x - self.min_value) / self.interval + 0.5)
        return min(max(position, 0), self.size - 1)

    def snap_indices(self, xs: np.ndarray) -> np.ndarray:
        offsets = np.asarray(xs, dtype=np.float64) - self.min_value
        positions = np.floor(offsets / self.interval + 0.5)
        return np.clip(positions, 0, self.size - 1).astype(np.int64)

    def ceil_index(self, x: float) -> int:
        """Return the index of the smallest grid point >= x, clamped to the grid."""
        position = math.ceil((x - self.min_value) / self.interval - SNAP_TOLERANCE)
        return min(max(position, 0), self.size - 1)

    def to_dict(self) -> dict[str, float]:
        return {
            'min_value': self.min_value,
            'max_value': self.max_value,
            'interval': self.interval,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Grid:
        return cls(
            min_value=float(data['min_value']),
            max_value=float(data['max_value']),
            interval=float(data['interval']),
        )


@dataclass(frozen=True, eq=False)
class Pmf:
    grid: Grid
    probabilities: np.ndarray = field(repr=False)

    def __post_init__(self):
        probabilities = np.array(self.probabilities, dtype=np.float64)
        if probabilities.shape != (self.grid.size,):
            raise InvalidPmfError(
                f'Expected {self.grid.size} probabilities, got {probabilities.shape[0]}'
            )
        if np.any(probabilities < 0) or not np.all(np.isfinite(probabilities)):
            raise InvalidPmfError('Probabilities must be finite and non-negative')
        total = probabilities.sum()
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise InvalidPmfError(f'Probabilities sum to {total}, not 1')
        probabilities.flags.writeable = False
        object.__setattr__(self, 'probabilities', probabilities)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pmf):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.probabilities, other.probabilities)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def point_mass(cls, grid: Grid, value: float) -> Pmf:
        probabilities = np.zeros(grid.size)
        probabilities[grid.snap_index(value)] = 1.0
        return cls(grid, probabilities)

    @classmethod
    def normalized(cls, grid: Grid, weights: np.ndarray) -> Pmf:
        weights = np.asarray(weights, dtype=np.float64)
        return cls(grid, weights / weights.sum())

    @cached_property
    def support(self) -> np.ndarray:
        """Indices of grid points carrying nonzero probability, in grid order."""
        return np.flatnonzero(self.probabilities > 0)

    def probability(self, value: float) -> float:
        return float(self.probabilities[self.grid.snap_index(value)])

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.probabilities)

    def to_dict(self) -> dict[str, Any]:
        return {'grid': self.grid.to_dict(), 'probabilities': self.probabilities.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Pmf:
        return cls(Grid.from_dict(data['grid']), np.asarray(data['probabilities']))


def pmf_from_samples(samples: Iterable[float], grid: Grid) -> Pmf:
    """Histogram samples onto the nearest grid points, clamping out-of-range values."""
    values = np.fromiter(samples, dtype=np.float64)
    if values.size == 0:
        raise EmptySampleError
    counts = np.bincount(grid.snap_indices(values), minlength=grid.size).astype(np.float64)
    return Pmf(grid, counts / values.size)


def pmf_expect(p: Pmf) -> float:
    return float(np.dot(p.grid.values, p.probabilities))


def pmf_mix(a: Pmf, b: Pmf, weight_a: float) -> Pmf:
    if a.grid != b.grid:
        raise GridMismatchError
    if not 0 <= weight_a <= 1:
        raise InvalidPmfError(f'Mixing weight must lie in [0, 1], got {weight_a}')
    if weight_a == 1:
        return a
    if weight_a == 0:
        return b
    return Pmf.normalized(a.grid, weight_a * a.probabilities + (1 - weight_a) * b.probabilities)


def pmf_transform(
    p: Pmf,
    f: Callable[[float], float],
    out_grid: Grid,
    *,
    rounding: Rounding = 'nearest',
) -> Pmf:
    """
    Push a PMF through a monotone map, accumulating probability onto `out_grid`.

    Input points where `f` is undefined (it raises an arithmetic error or returns a non-finite
    value) have their mass clamped to the largest output grid value; the clamped mass is logged.
    """
    snap = out_grid.ceil_index if rounding == 'ceil' else out_grid.snap_index
    out = np.zeros(out_grid.size)
    clamped_mass = 0.0
    for index in p.support:
        x = p.grid.value(index)
        mass = p.probabilities[index]
        try:
            y = f(x)
        except (ArithmeticError, ValueError):
            y = math.inf
        if not math.isfinite(y):
            out[-1] += mass
            clamped_mass += mass
            continue
        out[snap(y)] += mass

    if clamped_mass > 0:
        logger.warning(
            'Clamped probability mass %.6g to %s: transform undefined on part of the support',
            clamped_mass,
            out_grid.max_value,
        )

    return Pmf(out_grid, out)
