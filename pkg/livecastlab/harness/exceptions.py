from __future__ import annotations

from livecastlab.exceptions import LabError


class HarnessError(LabError):
    pass


class ConfigError(HarnessError):
    exit_code = 2

    def __init__(self, field: str, reason: str) -> None:
        self.field = field
        self.reason = reason
        super().__init__(f'Invalid config field {field}: {reason}')
