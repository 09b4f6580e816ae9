from __future__ import annotations

from typing import TYPE_CHECKING

from livecastlab.baselines.exceptions import UnknownControllerError
from livecastlab.baselines.fbra import FbraController
from livecastlab.baselines.fec import LightFecController, RfecController
from livecastlab.baselines.predictive import (
    BarocController,
    InformerCbrController,
    InformerVbrController,
    MtpCbrController,
)

if TYPE_CHECKING:
    from livecastlab.baselines import Controller, ControllerContext

CONTROLLERS: dict[str, type[Controller]] = {
    controller.name: controller
    for controller in (
        BarocController,
        FbraController,
        RfecController,
        LightFecController,
        InformerVbrController,
        MtpCbrController,
        InformerCbrController,
    )
}

# Controllers that need a bimodal model fitted on a training trace
BIMODAL_CONTROLLERS = frozenset({BarocController.name, MtpCbrController.name})
# Controllers whose decisions come from the distribution scheduler
MODEL_BASED_CONTROLLERS = (
    BarocController.name,
    InformerVbrController.name,
    MtpCbrController.name,
    InformerCbrController.name,
)


def build_controller(name: str, context: ControllerContext) -> Controller:
    try:
        controller_class = CONTROLLERS[name]
    except KeyError:
        raise UnknownControllerError(name) from None
    return controller_class.from_context(context)
