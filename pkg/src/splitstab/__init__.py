"""Split-form SBP discretizations of advection-type conservation laws and their local linear stability."""

from .fluxes import FluxDomainError, FluxKind, two_point_flux
from .operators import Family, Grid, OperatorError, SbpOperator, assemble_grid, build_circulant, build_csbp, build_lgl, build_operator
from .semidisc import ConfigError, Dissipation, DissVariable, Equation, SatKind, SchemeConfig, Semidiscretization

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DissVariable",
    "Dissipation",
    "Equation",
    "Family",
    "FluxDomainError",
    "FluxKind",
    "Grid",
    "OperatorError",
    "SatKind",
    "SbpOperator",
    "SchemeConfig",
    "Semidiscretization",
    "assemble_grid",
    "build_circulant",
    "build_csbp",
    "build_lgl",
    "build_operator",
    "two_point_flux",
]
