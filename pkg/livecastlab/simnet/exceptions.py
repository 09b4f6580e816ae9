from __future__ import annotations

from livecastlab.exceptions import LabError


class SimulationError(LabError):
    pass


class DurationMismatchError(SimulationError):
    def __init__(self, network_seconds: int, video_seconds: int) -> None:
        super().__init__(
            f'Network trace covers {network_seconds} s but video trace covers {video_seconds} s'
        )


class UnknownDecodePolicyError(SimulationError):
    def __init__(self, policy: str) -> None:
        super().__init__(f'Unknown decode policy {policy!r}')
