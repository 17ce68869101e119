"""Reference scales, dimensionless groups and solver settings.

This is the only module that touches SI units. Everything downstream works
with the dimensionless quantities produced here.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy import constants as sc

from .errors import InvalidInputError

FARADAY = sc.physical_constants["Faraday constant"][0]
GAS_CONSTANT = sc.R
VACUUM_PERMITTIVITY = sc.epsilon_0


@dataclass(frozen=True)
class ReferenceScales:
    """Dimensional reference scales (SI units, concentration in mol/L)."""

    L0: float = 1e-8
    R0: float = 1e-9
    tau: float = 1e-7
    cR: float = 1.0
    sigmaR: float = 0.16
    T: float = 298.15
    nu: float = 0.8904e-3
    epsR: float = 78.49
    phi_ref: float | None = None  # reference potential in V; None means R_G T / F

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None and f.name == "phi_ref":
                continue
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"reference scale {f.name} must be positive, got {value!r}")
        if self.epsR <= 1:
            raise InvalidInputError("relative permittivity must exceed 1")

    @property
    def nR(self) -> float:
        """Reference molar density in mol/m^3."""
        return self.cR * 1e3

    @property
    def DR(self) -> float:
        return self.L0**2 / self.tau

    @property
    def phiR(self) -> float:
        """Reference potential in volts, the thermal voltage unless overridden."""
        if self.phi_ref is not None:
            return self.phi_ref
        return GAS_CONSTANT * self.T / FARADAY

    @property
    def pR(self) -> float:
        return self.nR * GAS_CONSTANT * self.T

    @property
    def uR(self) -> float:
        return self.pR * self.R0**2 / (self.nu * self.L0)

    @property
    def IR(self) -> float:
        return FARADAY * self.R0**2 * self.DR * self.nR / self.L0

    @property
    def QR(self) -> float:
        """Reference volumetric flow rate u^R R0^2 in m^3/s."""
        return self.uR * self.R0**2

    @classmethod
    def from_groups(cls, groups: "DimensionlessGroups", L0: float, cR: float = 1.0,
                    T: float = 298.15, nu: float = 0.8904e-3,
                    phi_ref: float | None = None) -> "ReferenceScales":
        """Invert :func:`derive_groups` for R0, sigmaR, tau and epsR.

        L0, cR, T, nu and phi_ref are not determined by the groups and must
        be given.
        """
        R0 = groups.delta * L0
        phiR = GAS_CONSTANT * T / FARADAY if phi_ref is None else phi_ref
        nR = cR * 1e3
        eps = groups.Lambda**2 * FARADAY * nR * R0**2 / phiR
        sigmaR = groups.gamma * eps * phiR / R0
        uR = nR * GAS_CONSTANT * T * R0**2 / (nu * L0)
        DR = uR * L0 / groups.Pe
        return cls(L0=L0, R0=R0, tau=L0**2 / DR, cR=cR, sigmaR=sigmaR, T=T, nu=nu,
                   epsR=eps / VACUUM_PERMITTIVITY, phi_ref=phi_ref)


@dataclass(frozen=True)
class DimensionlessGroups:
    """Debye-length ratio, surface-charge group, Peclet number, aspect ratio."""

    Lambda: float
    gamma: float
    Pe: float
    delta: float

    def __post_init__(self):
        if not self.Lambda > 0:
            raise InvalidInputError("Lambda must be positive")
        if not 0 < self.delta < 1:
            raise InvalidInputError("delta must lie in (0, 1)")
        if not self.Pe >= 0:
            raise InvalidInputError("Pe must be non-negative")
        if not np.isfinite(self.gamma):
            raise InvalidInputError("gamma must be finite")
        if self.Lambda > 1:
            warnings.warn(f"Lambda = {self.Lambda:g} > 1 lies outside the thin-gap regime "
                          "the reduced model is derived for", stacklevel=2)


def derive_groups(scales: ReferenceScales) -> DimensionlessGroups:
    """Compute Lambda, gamma, Pe and delta from reference scales."""
    eps = VACUUM_PERMITTIVITY * scales.epsR
    phiR = scales.phiR
    Lambda = math.sqrt(eps * phiR / (FARADAY * scales.nR * scales.R0**2))
    gamma = scales.R0 * scales.sigmaR / (eps * phiR)
    Pe = scales.uR * scales.L0 / scales.DR
    delta = scales.R0 / scales.L0
    return DimensionlessGroups(Lambda=Lambda, gamma=gamma, Pe=Pe, delta=delta)


@dataclass(frozen=True)
class SolverConfig:
    n_r: int = 200
    n_z: int = 200
    picard_tol: float = 1e-8
    picard_max_iter: int = 200
    relaxation: float = 1.0
    newton_tol: float = 1e-12
    newton_max_iter: int = 100
    pseudo_time: float = 0.0  # backward-Euler step for the Q equation; 0 disables it
    acceleration_depth: int = 5  # Anderson history length; 0 gives plain relaxed Picard

    def __post_init__(self):
        if self.n_r < 16 or self.n_z < 16:
            raise InvalidInputError("n_r and n_z must be at least 16")
        if not (self.picard_tol > 0 and self.newton_tol > 0):
            raise InvalidInputError("tolerances must be positive")
        if self.picard_max_iter < 1 or self.newton_max_iter < 1:
            raise InvalidInputError("iteration caps must be positive")
        if not 0 < self.relaxation <= 1:
            raise InvalidInputError("relaxation must lie in (0, 1]")
        if self.acceleration_depth < 0:
            raise InvalidInputError("acceleration_depth must be non-negative")
        if self.pseudo_time < 0:
            raise InvalidInputError("pseudo_time must be non-negative")

    def with_resolution(self, n_r: int, n_z: int) -> "SolverConfig":
        return replace(self, n_r=n_r, n_z=n_z)


@dataclass(frozen=True)
class BoundaryConditions:
    """Dirichlet data at the outlet (z = 0) and inlet (z = L)."""

    n_out: tuple[float, ...]
    n_in: tuple[float, ...]
    phi_out: float = 0.0
    phi_in: float = 0.0
    p_out: float = 0.0
    p_in: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n_out", tuple(float(x) for x in self.n_out))
        object.__setattr__(self, "n_in", tuple(float(x) for x in self.n_in))
        if len(self.n_out) != len(self.n_in):
            raise InvalidInputError("n_out and n_in must list the same species")
        if min(self.n_out + self.n_in) < 0:
            raise InvalidInputError("boundary concentrations must be non-negative")

    @property
    def dphi(self) -> float:
        return self.phi_in - self.phi_out

    @property
    def dp(self) -> float:
        return self.p_in - self.p_out

    @classmethod
    def bulk(cls, n: float, n_species: int = 2, dphi: float = 0.0, dp: float = 0.0):
        """Equal bulk concentration on both ends, differences applied at the inlet."""
        return cls(n_out=(n,) * n_species, n_in=(n,) * n_species, phi_in=dphi, p_in=dp)
