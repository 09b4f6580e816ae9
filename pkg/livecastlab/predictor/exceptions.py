from __future__ import annotations

from livecastlab.exceptions import LabError


class PredictorError(LabError):
    pass


class EmptyHistoryError(PredictorError):
    message = 'Cannot predict from an empty history'


class UnlabeledTraceError(PredictorError):
    message = 'Trace must be labeled with regimes before fitting'


class InvalidPredictorConfigError(PredictorError):
    message = 'Invalid predictor configuration'
