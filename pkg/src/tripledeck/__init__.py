"""Lower-deck triple-deck solver with analytic-norm energy audits."""

__version__ = "0.1.0"

from .errors import (BlowUpError, CertificationError, ConfigurationError,  # noqa: E402
                     CorruptCheckpointError, RadiusExhaustedError, TripleDeckError)
from .spectral import Grid  # noqa: E402
from .prandtl import DeckState, Switches  # noqa: E402
from .stepper import Integrator, ModelParams, RunState, StepperConfig  # noqa: E402

__all__ = [
    "Grid", "DeckState", "Switches", "Integrator", "ModelParams", "RunState", "StepperConfig",
    "TripleDeckError", "ConfigurationError", "BlowUpError", "RadiusExhaustedError",
    "CorruptCheckpointError", "CertificationError",
]
