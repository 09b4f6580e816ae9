from __future__ import annotations

from livecastlab.exceptions import LabError


class ControllerError(LabError):
    pass


class UnknownControllerError(ControllerError):
    def __init__(self, name: str) -> None:
        super().__init__(f'Unknown controller {name!r}')


class MissingBimodalModelError(ControllerError):
    message = 'This controller needs a fitted bimodal model'
