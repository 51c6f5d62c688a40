"""Exact toolkit for planar sets whose distance function is a difference of convex functions."""

from .errors import PreconditionError
from .plcalc import PLFunction
from .sets import (
    DCGraphPiece,
    PlacedSSet,
    PlanarSetPresentation,
    SSetPresentation,
    Window,
    assemble_and_check,
    validate_sset,
)

__version__ = "0.1.0"

__all__ = [
    "PreconditionError",
    "PLFunction",
    "DCGraphPiece",
    "PlacedSSet",
    "PlanarSetPresentation",
    "SSetPresentation",
    "Window",
    "assemble_and_check",
    "validate_sset",
]
