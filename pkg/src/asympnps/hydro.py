"""Pressure closure and axial velocity of the reduced Stokes problem.

Fields live on the logical rectangle (s, z) with r = s R(z). Derivatives in z
at fixed r are formed by the chain rule

    d/dz|_r f = d/dz|_s f - (s R'/R) d/ds f,

with second-order central differences (one-sided at the ends).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .geometry import PoreGeometry


def _ds(f, s):
    return np.gradient(f, s, axis=-1, edge_order=2)


def dz_at_fixed_r(f, s, geometry: PoreGeometry):
    """d/dz at fixed r of a field sampled on (..., n_z, n_s)."""
    dz_s = np.gradient(f, geometry.z, axis=-2, edge_order=2)
    stretch = s[None, :] * (geometry.dRdz / geometry.R)[:, None]
    return dz_s - stretch * _ds(f, s)


def _cum_s(f, s):
    return cumulative_trapezoid(f, s, axis=-1, initial=0.0)


def _crowding_integral(A, E, s):
    """int_0^r E dA along the radius, per species; zero when A is constant."""
    dA = np.diff(A, axis=-1)
    Em = 0.5 * (E[..., 1:] + E[..., :-1])
    out = np.zeros_like(A)
    out[..., 1:] = np.cumsum(Em * dA, axis=-1)
    return out


def qcheck_kernel(Q, A, E, s):
    """Qcheck(r, z) = sum_a Q_a [A_a E_a - int_0^r E_a dA_a], shape (n_z, n_r)."""
    Qc = np.asarray(Q)[:, :, None]
    return np.sum(Qc * (A * E - _crowding_integral(A, E, s)), axis=0)


def pressure_radial(Q, A, E, s):
    """p_r = Qcheck - Qcheck(r = 0) together with the kernel itself."""
    Qcheck = qcheck_kernel(Q, A, E, s)
    return Qcheck - Qcheck[:, :1], Qcheck


@dataclass(frozen=True, eq=False)
class EDLKernels:
    K1: np.ndarray
    K2: np.ndarray
    K3: np.ndarray
    zeta_int: np.ndarray  # int_0^R zeta r dr per slice
    I_Ez: np.ndarray
    I_K3: np.ndarray


def edl_kernels(Q, A, E, s, weights, zeta, dphi_z, geometry: PoreGeometry,
                Lambda: float) -> EDLKernels:
    """K1, K2, K3 and the cumulative integrals I_Ez and I_K3.

    ``Q`` is (n_species, n_z); ``A`` and ``E`` are (n_species, n_z, n_r);
    ``zeta`` and ``weights`` are (n_z, n_r).
    """
    Qc = np.asarray(Q)[:, :, None]
    R = geometry.R
    term1 = np.sum(dz_at_fixed_r(Qc * A, s, geometry) * E, axis=0)
    crowd = np.sum(Qc * _crowding_integral(A, E, s), axis=0)
    dcrowd = dz_at_fixed_r(crowd, s, geometry)
    Qcheck0 = np.sum(Qc[:, :, 0] * A[:, :, 0] * E[:, :, 0], axis=0)
    dQcheck0 = np.gradient(Qcheck0, geometry.z, edge_order=2)
    G = term1 - dQcheck0[:, None] - dcrowd
    # K1 = int_0^r G r dr = R^2 int_0^s G s ds
    K1 = R[:, None] ** 2 * _cum_s(G * s[None, :], s)
    # K2 = int_0^r K1 / r dr = int_0^s K1 / s ds; integrand vanishes at the axis
    integrand = np.zeros_like(K1)
    integrand[:, 1:] = K1[:, 1:] / s[None, 1:]
    K2 = _cum_s(integrand, s)
    # measured from the wall so the flow rate stays constant in z
    K3 = np.sum((K2 - K2[:, -1:]) * weights, axis=1)
    zeta_int = np.sum(zeta * weights, axis=1)
    I_Ez = cumulative_trapezoid(16.0 * Lambda**2 * dphi_z * zeta_int / R**4, geometry.z,
                                initial=0.0)
    I_K3 = cumulative_trapezoid(16.0 * K3 / R**4, geometry.z, initial=0.0)
    return EDLKernels(K1=K1, K2=K2, K3=K3, zeta_int=zeta_int, I_Ez=I_Ez, I_K3=I_K3)


@dataclass(frozen=True, eq=False)
class PressureField:
    p_r: np.ndarray
    p_z: np.ndarray
    dp_z: np.ndarray
    Qcheck: np.ndarray
    Psi: np.ndarray
    K4: np.ndarray

    @property
    def p(self) -> np.ndarray:
        return self.p_r + self.p_z[:, None]


def pressure_axial(kernels: EDLKernels, geometry: PoreGeometry, p_out: float, p_in: float,
                   dphi_z, Lambda: float):
    """p_z, its derivative, Psi and K4.

    Psi and K4 vanish at both ends by construction, so p_z(0) = -p_out and
    p_z(L) = -p_in.
    """
    R = geometry.R
    dIp = geometry.dI_p
    I_pL = geometry.I_p[-1]
    ddIp = R**-4 / I_pL
    I_Ez, I_K3 = kernels.I_Ez, kernels.I_K3
    Psi = I_Ez - I_Ez[0] - (I_Ez[-1] - I_Ez[0]) * dIp
    K4 = I_K3 - I_K3[0] - (I_K3[-1] - I_K3[0]) * dIp
    dPsi = 16.0 * Lambda**2 * dphi_z * kernels.zeta_int / R**4 - (I_Ez[-1] - I_Ez[0]) * ddIp
    dK4 = 16.0 * kernels.K3 / R**4 - (I_K3[-1] - I_K3[0]) * ddIp
    dp = p_in - p_out
    p_z = -dp * dIp - p_out - Psi + K4
    dp_z = -dp * ddIp - dPsi + dK4
    return p_z, dp_z, Psi, K4


@dataclass(frozen=True, eq=False)
class VelocityField:
    u: np.ndarray
    w: np.ndarray | None = None

    @property
    def u_wall(self) -> np.ndarray:
        return self.u[:, -1]


def velocity(dp_z, dphi_z, zeta, K2, s, geometry: PoreGeometry, Lambda: float) -> np.ndarray:
    """u = dp_z (r^2 - R^2)/4 - dphi_z Lambda^2 zeta + K2 - K2(R) on (n_z, n_r)."""
    R2 = geometry.R[:, None] ** 2
    u = (dp_z[:, None] * R2 * (s[None, :] ** 2 - 1.0) / 4.0
         - dphi_z[:, None] * Lambda**2 * zeta + K2 - K2[:, -1:])
    u[:, -1] = 0.0  # each term vanishes at the wall; remove rounding
    return u


def radial_velocity(u, s, geometry: PoreGeometry) -> np.ndarray:
    """w from continuity: r w = -int_0^r du/dz r dr (diagnostic only)."""
    du = dz_at_fixed_r(u, s, geometry)
    R = geometry.R[:, None]
    rw = -R**2 * _cum_s(du * s[None, :], s)
    w = np.zeros_like(u)
    w[:, 1:] = rw[:, 1:] / (s[None, 1:] * R)
    return w


def flow_rate(u, weights) -> np.ndarray:
    """int_0^R u r dr per slice."""
    return np.sum(u * weights, axis=1)
