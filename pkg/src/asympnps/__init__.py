"""Asymptotic Poisson-Nernst-Planck-Stokes model of electrolyte transport in
long, narrow nanopores.

The pore is reduced to a radial Poisson problem per axial slice, a 1D
transport equation per species and a lubrication-type Stokes closure, coupled
by a fixed-point iteration.
"""
from .config import CaseSpec, GeometrySpec, MixtureSpec, load_preset, PRESET_NAMES
from .coupler import Problem, SteadySolution, solve_steady
from .errors import (InvalidInputError, NonConvergenceError, PresetNotFoundError,
                     ProfileFormatError, StateError, UnsolvableError, UnsupportedGeometryError)
from .geometry import PoreGeometry, make_cylinder, make_trumpet, tanh_surface_charge
from .mixture import Mixture, Species
from .observables import (current_at, current_decomposition, flow_decomposition, mean_flow,
                          summary, transport_metrics, zeta_mean)
from .units import (BoundaryConditions, DimensionlessGroups, ReferenceScales, SolverConfig,
                    derive_groups)

__all__ = [
    "BoundaryConditions", "CaseSpec", "DimensionlessGroups", "GeometrySpec", "InvalidInputError",
    "Mixture", "MixtureSpec", "NonConvergenceError", "PRESET_NAMES", "PoreGeometry",
    "PresetNotFoundError", "Problem", "ProfileFormatError", "ReferenceScales", "SolverConfig",
    "Species", "StateError", "SteadySolution", "UnsolvableError", "UnsupportedGeometryError",
    "current_at", "current_decomposition", "derive_groups", "flow_decomposition", "load_preset",
    "make_cylinder", "make_trumpet", "mean_flow", "solve_steady", "summary",
    "tanh_surface_charge", "transport_metrics", "zeta_mean",
]
