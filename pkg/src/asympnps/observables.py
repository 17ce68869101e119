"""Derived quantities of a steady solution: currents, flow decompositions and
transport coefficients.

Angle brackets denote integrals over the pore volume without the factor 2 pi,
<f> = int_0^L int_0^R f r dr dz. Currents carry the factor 2 pi,
I_a = 2 pi z_a [k_a (Q_a' + z_a Q_a phi_z') H1_a - Pe Q_a H2_a].
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .coupler import SteadySolution
from .errors import InvalidInputError, UnsupportedGeometryError
from .units import DimensionlessGroups

# currents and flow rates below this are roundoff of an equilibrium state
ZERO_LEVEL = 1e-10


@dataclass(frozen=True)
class CurrentReport:
    z: float
    species: np.ndarray
    total: float


def _face_index(solution: SteadySolution, z_S: float) -> int:
    return int(np.argmin(np.abs(solution.face_z - z_S)))


def current_at(solution: SteadySolution, z_S: float = 0.0) -> CurrentReport:
    """Species and total current through the face nearest ``z_S``."""
    i = _face_index(solution, z_S)
    I = solution.currents[:, i]
    return CurrentReport(z=float(solution.face_z[i]), species=I.copy(), total=float(I.sum()))


def current_variation(solution: SteadySolution) -> float:
    """Spread of the total current over the faces, relative to the mean of
    sum_a |I_a| (which stays finite where the total current crosses zero)."""
    I = solution.currents
    return float(np.ptp(I.sum(axis=0)) / max(np.mean(np.sum(np.abs(I), axis=0)), ZERO_LEVEL))


def flow_rate_variation(solution: SteadySolution) -> float:
    """Spread of int u r dr over the slices, relative to the mean of int |u| r dr."""
    scale = np.mean(np.sum(np.abs(solution.u) * solution.weights, axis=1))
    return float(np.ptp(solution.flow_rate) / max(scale, ZERO_LEVEL))


def zeta_mean(solution: SteadySolution) -> float:
    """<zeta> = int int zeta r dr dz."""
    return float(trapezoid(solution.kernels.zeta_int, solution.geometry.z))


def mean_flow(solution: SteadySolution) -> float:
    """<u> = int int u r dr dz."""
    return float(trapezoid(solution.flow_rate, solution.geometry.z))


def flow_coefficient(groups: DimensionlessGroups, R: float, L: float) -> float:
    """C_u = 16 Lambda^2 / (R^4 L); <u> = 0 where dp = C_u <zeta> dphi."""
    return 16.0 * groups.Lambda**2 / (R**4 * L)


@dataclass(frozen=True)
class FlowDecomposition:
    PF: float
    HS: float
    EDL: float
    total: float

    @property
    def defect(self) -> float:
        return abs(self.total - (self.PF + self.HS + self.EDL))


def _require_cylinder(solution: SteadySolution):
    if not solution.geometry.is_cylinder:
        raise UnsupportedGeometryError("the decompositions are defined for cylindrical pores only")


def flow_decomposition(solution: SteadySolution) -> FlowDecomposition:
    """Poiseuille, Helmholtz-Smoluchowski and double-layer parts of <u>."""
    _require_cylinder(solution)
    geo, bc = solution.geometry, solution.problem.bc
    R, L = float(geo.R[0]), geo.L
    Lambda = solution.problem.groups.Lambda
    PF = bc.dp * R**4 / 16.0
    HS = -Lambda**2 * bc.dphi / L * zeta_mean(solution)
    EDL = float(trapezoid(solution.kernels.K3, geo.z))
    return FlowDecomposition(PF=PF, HS=HS, EDL=EDL, total=mean_flow(solution))


@dataclass(frozen=True)
class CurrentDecomposition:
    """Electro-osmotic, pressure and concentration parts of I_a at z = 0.

    ``threshold`` is C_a, the pressure per unit voltage at which I_E + I_P
    changes sign; ``actual`` is the solved current at the inlet face.
    """

    I_E: np.ndarray
    I_P: np.ndarray
    I_C: np.ndarray
    threshold: np.ndarray
    actual: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.I_E + self.I_P + self.I_C


def current_decomposition(solution: SteadySolution) -> CurrentDecomposition:
    """Small-potential split of the species currents for a cylinder.

    Requires equal bulk concentrations at both ends.
    """
    _require_cylinder(solution)
    prob = solution.problem
    bc, mix, groups = prob.bc, prob.mixture, prob.groups
    if not np.allclose(bc.n_out, bc.n_in):
        raise InvalidInputError("current decomposition needs equal bulk concentrations")
    geo = solution.geometry
    R, L = float(geo.R[0]), geo.L
    Pe, Lambda = groups.Pe, groups.Lambda
    n = np.array(bc.n_out)
    z, k = mix.z, mix.k
    zeta = zeta_mean(solution)
    edl = flow_decomposition(solution).EDL
    dphi, dp = bc.dphi, bc.dp
    I_E = 2 * np.pi * n * dphi / L * (z**2 * k * R**2 / 2 + z * Pe * Lambda**2 * zeta / L)
    I_P = -2 * np.pi * z * Pe * n * dp * R**4 / (16 * L)
    I_C = (2 * np.pi * z * k * solution.factors.dQdz[:, 0] * solution.closure.H1[:, 0]
           - 2 * np.pi * z * Pe * n * edl / L)
    with np.errstate(divide="ignore"):
        threshold = 8 * z * k / (Pe * R**2) + 16 * Lambda**2 * zeta / (L * R**4)
    return CurrentDecomposition(I_E=I_E, I_P=I_P, I_C=I_C, threshold=threshold,
                                actual=current_at(solution, 0.0).species)


@dataclass(frozen=True)
class TransportMetrics:
    t: np.ndarray
    conductance: np.ndarray | None
    Q_eo: float
    currents: np.ndarray


def outflow_rate(solution: SteadySolution, z_S: float = 0.0) -> float:
    """Volume flux through the cross-section at ``z_S`` along the outward
    normal of the z = 0 end, -2 pi int u r dr."""
    i = int(np.argmin(np.abs(solution.geometry.z - z_S)))
    return float(-2.0 * np.pi * solution.flow_rate[i])


def transport_metrics(solution: SteadySolution, z_S: float = 0.0) -> TransportMetrics:
    """Transport numbers t_a = I_a / sum I, conductances I_a / dphi and Q_eo."""
    I = current_at(solution, z_S).species
    total = I.sum()
    if not abs(total) > ZERO_LEVEL:
        if np.all(np.abs(I) <= ZERO_LEVEL):
            raise InvalidInputError("transport numbers are undefined without current")
        raise InvalidInputError("transport numbers are undefined: the species currents cancel")
    dphi = solution.problem.bc.dphi
    return TransportMetrics(t=I / total, conductance=I / dphi if dphi != 0 else None,
                            Q_eo=outflow_rate(solution, z_S), currents=I)


def summary(solution: SteadySolution) -> dict:
    """Scalar observables in a fixed order, keyed by their symbols."""
    prob = solution.problem
    bc, groups, geo = prob.bc, prob.groups, solution.geometry
    names = [s.name for s in prob.mixture.species]
    I = current_at(solution, 0.0)
    u = solution.u
    iz, ir = np.unravel_index(np.argmax(np.abs(u)), u.shape)
    out = {
        "dphi": bc.dphi,
        "dp": bc.dp,
        "n_bulk": float(bc.n_out[0]),
        "zeta_mean": zeta_mean(solution),
        "u_mean": mean_flow(solution),
        "u_max": float(u[iz, ir]),
        "z_u_max": float(geo.z[iz]),
        "Q_eo": outflow_rate(solution),
    }
    for name, value in zip(names, I.species):
        out[f"I_{name}"] = float(value)
    out["I"] = I.total
    if abs(I.total) > ZERO_LEVEL:
        for name, value in zip(names, I.species):
            out[f"t_{name}"] = float(value / I.total)
    else:
        for name in names:
            out[f"t_{name}"] = float("nan")
    if geo.is_cylinder:
        out["C_u"] = flow_coefficient(groups, float(geo.R[0]), geo.L)
    out["current_variation"] = current_variation(solution)
    out["flow_rate_variation"] = flow_rate_variation(solution)
    out["iterations"] = solution.iterations
    out["converged"] = int(solution.converged)
    return out
