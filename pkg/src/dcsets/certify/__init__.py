"""Certification pipelines: cone potentials (positive) and cone-emptiness witnesses (negative)."""

from .grid import GraphFamily, GridApprox, SlopeStats, graph_family, grid_approx
from .falsify import (
    BlowupRow,
    NonDCWitness,
    ProjectionClass,
    Witness,
    alpha_lower_bound,
    cone_projection,
    cone_projection_classify,
    convexity_blowup,
    detect_non_dc,
)
from .potential import ConcavityReport, ConePotential, PsiField, build_psi, cone_potential, verify_local_concavity
from .selection import SelectionResult, lipschitz_selection

__all__ = [
    "GraphFamily",
    "GridApprox",
    "SlopeStats",
    "graph_family",
    "grid_approx",
    "ConePotential",
    "PsiField",
    "ConcavityReport",
    "cone_potential",
    "build_psi",
    "verify_local_concavity",
    "ProjectionClass",
    "Witness",
    "NonDCWitness",
    "BlowupRow",
    "cone_projection",
    "cone_projection_classify",
    "detect_non_dc",
    "convexity_blowup",
    "alpha_lower_bound",
    "SelectionResult",
    "lipschitz_selection",
]
