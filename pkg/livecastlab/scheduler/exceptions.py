from __future__ import annotations

from livecastlab.exceptions import LabError


class SchedulerError(LabError):
    pass


class TotalLossError(SchedulerError, ArithmeticError):
    message = 'Total loss uncoverable: no FEC ratio recovers a loss ratio of 1'


class EmptyPredictionsError(SchedulerError):
    message = 'At least one prediction step is required'


class HorizonError(SchedulerError):
    pass


class InvalidDecisionError(SchedulerError):
    pass


class InvalidQoeWeightsError(SchedulerError):
    pass
