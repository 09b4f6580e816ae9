from __future__ import annotations


class LabError(Exception):
    message: str | None = None
    exit_code: int = 1

    def __init__(self, message: str | None = None, exit_code: int | None = None, *args: object):
        self.message = message or self.message
        self.exit_code = exit_code or self.exit_code

        super().__init__(self.message, *args)

    def __str__(self) -> str:
        return self.message or self.__class__.__name__
