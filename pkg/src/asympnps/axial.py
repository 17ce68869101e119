"""Axial potential, closure integrals and the steady transport equation for Q.

The transport equation per species reads

    d/dz [ k (Q' + z Q phi_z') H1 - Pe Q H2 ] = 0,

discretised in flux form with Scharfetter-Gummel (exponential) fitting. The
advective H2 term is folded into an effective drift so the scheme stays
monotone for any cell Peclet number.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidInputError, StateError
from .geometry import PoreGeometry
from .mixture import Mixture
from .units import BoundaryConditions

logger = logging.getLogger(__name__)


class NegativeFactorWarning(RuntimeWarning):
    """The axial solve produced negative Q; the drift is under-resolved."""


@dataclass(frozen=True, eq=False)
class AxialPotential:
    phi_z: np.ndarray
    dphi_z: np.ndarray


def axial_potential(bc: BoundaryConditions, geometry: PoreGeometry) -> AxialPotential:
    """phi_z = dphi * dI_phiz + phi_out with its exact derivative."""
    dphi = bc.phi_in - bc.phi_out
    phi = dphi * geometry.dI_phiz + bc.phi_out
    dphi_z = dphi / (geometry.R**2 * geometry.I_phiz[-1])
    return AxialPotential(phi_z=phi, dphi_z=dphi_z)


@dataclass(frozen=True, eq=False)
class TransportClosure:
    """H1 and H2 per species, shape (n_species, n_z)."""

    H1: np.ndarray
    H2: np.ndarray


def closure_integrals(A, E, weights, u=None) -> TransportClosure:
    """Radial quadratures of A*E and u*A*E.

    ``A`` and ``E`` are (n_species, n_z, n_r); ``weights`` is (n_z, n_r);
    ``u`` is (n_z, n_r) or None for a fluid at rest.
    """
    AE = np.asarray(A) * np.asarray(E)
    H1 = np.einsum("azr,zr->az", AE, weights)
    if u is None:
        H2 = np.zeros_like(H1)
    else:
        H2 = np.einsum("azr,zr->az", AE, np.asarray(u) * weights)
    return TransportClosure(H1=H1, H2=H2)


def bernoulli(x):
    """B(x) = x / (exp(x) - 1) with the removable singularity at 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    xs = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        big = xs / np.expm1(xs)
    return np.where(small, 1.0 - x / 2.0 + x * x / 12.0, big)


def _face_mean(f):
    return 0.5 * (f[..., 1:] + f[..., :-1])


@dataclass(frozen=True, eq=False)
class AxialFactors:
    """Q per species on the z nodes and the face fluxes between them.

    ``flux`` is k (Q' + z Q phi_z') H1 - Pe Q H2 on each of the n_z - 1 faces.
    """

    Q: np.ndarray
    dQdz: np.ndarray
    flux: np.ndarray
    negative: bool = False


def face_fluxes(Q, z, closure: TransportClosure, dphi_face, mixture: Mixture, Pe: float):
    """Scharfetter-Gummel face fluxes for given nodal Q."""
    h = np.diff(z)
    H1f = _face_mean(closure.H1)
    H2f = _face_mean(closure.H2)
    k = mixture.k[:, None]
    drift = mixture.z[:, None] * dphi_face[None, :] - Pe * H2f / (k * H1f)
    x = drift * h
    coef = k * H1f / h
    return coef * (bernoulli(-x) * Q[:, 1:] - bernoulli(x) * Q[:, :-1])


def solve_axial(closure: TransportClosure, phi: AxialPotential, geometry: PoreGeometry,
                Q_out, Q_in, mixture: Mixture, Pe: float, Q_old=None,
                pseudo_time: float = 0.0) -> AxialFactors:
    """Steady (or one backward-Euler pseudo-time step) solve for Q.

    ``Q_out`` and ``Q_in`` are the Dirichlet data at z = 0 and z = L.
    With ``pseudo_time > 0`` the H1 mass term is kept with that step size,
    starting from ``Q_old``.
    """
    z = geometry.z
    n_z = z.size
    H1 = closure.H1
    if np.any(~(H1 > 0)):
        raise StateError("closure integral H1 must be positive on every slice")
    h = np.diff(z)
    # node potential differences give the exact face field for the closed-form phi_z
    dphi_face = np.diff(phi.phi_z) / h
    H1f = _face_mean(H1)
    H2f = _face_mean(closure.H2)
    k = mixture.k[:, None]
    x = (mixture.z[:, None] * dphi_face[None, :] - Pe * H2f / (k * H1f)) * h
    coef = k * H1f / h
    bm, bp = bernoulli(-x), bernoulli(x)  # flux = coef (bm Q_{i+1} - bp Q_i)

    Q = np.empty((mixture.n_species, n_z))
    for a in range(mixture.n_species):
        ab = np.zeros((3, n_z))
        rhs = np.zeros(n_z)
        # row i: flux_{i+1/2} - flux_{i-1/2} = mass term
        ab[1, 1:-1] = -coef[a, 1:] * bp[a, 1:] - coef[a, :-1] * bm[a, :-1]
        ab[0, 2:] = coef[a, 1:] * bm[a, 1:]      # J[i, i+1]
        ab[2, :-2] = coef[a, :-1] * bp[a, :-1]   # J[i, i-1]
        if pseudo_time > 0:
            if Q_old is None:
                raise InvalidInputError("pseudo-time stepping needs the previous Q")
            vol = np.zeros(n_z)
            vol[1:-1] = 0.5 * (z[2:] - z[:-2])
            m = H1[a] * vol / pseudo_time
            ab[1, 1:-1] -= m[1:-1]
            rhs[1:-1] = -m[1:-1] * Q_old[a, 1:-1]
        ab[1, 0] = ab[1, -1] = 1.0
        ab[0, 1] = 0.0
        ab[2, -2] = 0.0
        rhs[0], rhs[-1] = Q_out[a], Q_in[a]
        try:
            Q[a] = solve_banded((1, 1), ab, rhs)
        except np.linalg.LinAlgError as exc:
            raise StateError(f"axial system for species {a} is singular") from exc

    negative = bool(np.any(Q < 0))
    if negative:
        warnings.warn("axial solve produced negative Q; refine the z grid",
                      NegativeFactorWarning, stacklevel=2)
    flux = coef * (bm * Q[:, 1:] - bp * Q[:, :-1])
    dQdz = np.gradient(Q, z, axis=1, edge_order=2)
    return AxialFactors(Q=Q, dQdz=dQdz, flux=flux, negative=negative)


def species_currents(factors: AxialFactors, mixture: Mixture) -> np.ndarray:
    """I = 2 pi z J on every face, shape (n_species, n_z - 1)."""
    return 2.0 * np.pi * mixture.z[:, None] * factors.flux
