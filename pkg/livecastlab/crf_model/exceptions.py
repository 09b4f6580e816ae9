from __future__ import annotations

from livecastlab.exceptions import LabError


class CrfModelError(LabError):
    pass


class UnknownCrfError(CrfModelError):
    def __init__(self, crf: int) -> None:
        super().__init__(f'CRF {crf} is not one of the configured quality levels')


class InsufficientSamplesError(CrfModelError):
    message = 'Too few samples to fit a mixture'


class InvalidObservationError(CrfModelError):
    message = 'Observed bitrate must be positive'
