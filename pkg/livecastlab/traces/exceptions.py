from __future__ import annotations

from typing import TYPE_CHECKING

from livecastlab.exceptions import LabError

if TYPE_CHECKING:
    from pathlib import Path


class TraceError(LabError):
    pass


class TraceSchemaError(TraceError):
    def __init__(self, path: Path | str, line: int, reason: str) -> None:
        self.path = str(path)
        self.line = line
        self.reason = reason
        super().__init__(f'{path}:{line}: {reason}')


class NonMonotoneTimestampsError(TraceSchemaError):
    def __init__(self, path: Path | str, line: int) -> None:
        super().__init__(path, line, 'timestamps must be strictly increasing')


class InvalidRegimeParamsError(TraceError):
    message = 'Invalid regime parameters'
