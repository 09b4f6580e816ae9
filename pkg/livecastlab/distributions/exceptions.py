from __future__ import annotations

from livecastlab.exceptions import LabError


class DistributionError(LabError):
    pass


class GridError(DistributionError):
    message = 'Invalid grid'


class InvalidPmfError(DistributionError):
    message = 'Probabilities do not form a valid probability mass function'


class GridMismatchError(DistributionError):
    message = 'Distributions are defined on different grids'


class EmptySampleError(DistributionError):
    message = 'no samples'
