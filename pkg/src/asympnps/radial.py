"""Nonlinear radial Poisson problem on each axial slice.

Solves  -(1/r) d/dr (r dphi/dr) = q(phi) / Lambda**2  on [0, R] with
dphi/dr(0) = 0 and dphi/dr(R) = gamma * sigma.

Sign convention: a positive ``sigma`` is a wall charge that attracts anions.
The potential then rises toward the wall, the zeta potential is negative and
the fluid carries the compensating charge -Lambda**2 gamma sigma R per unit
length. The nonlinearity of q selects the additive constant of phi.

The discretisation is a cell-centred finite-volume scheme on a uniform
radial grid with nodes at r = 0 and r = R. Its control-volume weights are
also the quadrature weights for integrals of the form int f r dr, which makes
the discrete electroneutrality identity hold to solver precision.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidInputError, NonConvergenceError, UnsolvableError
from .mixture import Mixture, charge_density, slice_composition

logger = logging.getLogger(__name__)

MAX_HALVINGS = 8


def unit_grid(n_r: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on [0, 1] and the finite-volume weights for int_0^1 f s ds."""
    if n_r < 3:
        raise InvalidInputError("need at least 3 radial nodes")
    s = np.linspace(0.0, 1.0, n_r)
    h = s[1]
    w = s * h
    w[0] = h * h / 8.0
    w[-1] = h / 2.0 - h * h / 8.0
    return s, w


@dataclass(frozen=True, eq=False)
class RadialGrid:
    R: float
    r: np.ndarray
    weights: np.ndarray

    @classmethod
    def uniform(cls, R: float, n_r: int) -> "RadialGrid":
        if not R > 0:
            raise InvalidInputError("slice radius must be positive")
        s, w = unit_grid(n_r)
        return cls(R=float(R), r=s * R, weights=w * R * R)

    def integrate(self, f) -> np.ndarray:
        """int_0^R f r dr along the last axis."""
        return np.asarray(f) @ self.weights


@dataclass(frozen=True, eq=False)
class RadialPotential:
    grid: RadialGrid
    phi_r: np.ndarray
    zeta: np.ndarray
    residual_norm: float
    electroneutrality_defect: float
    iterations: int


@dataclass(frozen=True, eq=False)
class RadialStack:
    """Radial potentials for every axial slice; arrays are (n_z, n_r)."""

    s: np.ndarray
    weights: np.ndarray  # (n_z, n_r), already scaled by R**2
    phi_r: np.ndarray
    residual_norm: np.ndarray
    iterations: int

    @property
    def zeta(self) -> np.ndarray:
        return self.phi_r - self.phi_r[:, -1:]


def _residual(phi, Q, sigma, R, Lambda, gamma, mixture, c, w):
    """Discrete residual and the slope dq/dphi needed for its Jacobian."""
    q, dq = charge_density(Q, phi, mixture, with_slope=True)
    flux = c[None, :] * np.diff(phi, axis=1)  # c_{j+1/2} (phi_{j+1} - phi_j)
    F = w * q / Lambda**2
    F[:, :-1] += flux
    F[:, 1:] -= flux
    F[:, -1] += (R * gamma * sigma)[:, 0]
    return F, dq


def _jacobian_bands(dq, Lambda, c, w):
    n_z, n_r = dq.shape
    diag = w * dq / Lambda**2
    diag[:, :-1] -= c
    diag[:, 1:] -= c
    upper = np.zeros((n_z, n_r))
    upper[:, 1:] = c  # J[j, j+1] stored at column j+1
    lower = np.zeros((n_z, n_r))
    lower[:, :-1] = c  # J[j+1, j] stored at column j
    return np.stack([upper.ravel(), diag.ravel(), lower.ravel()])


def solve_radial_stack(Q, sigma, R, Lambda: float, gamma: float, mixture: Mixture,
                       n_r: int = 200, phi_init=None, tol: float = 1e-12,
                       max_iter: int = 100) -> RadialStack:
    """Damped Newton for all slices at once.

    ``Q`` is (n_species, n_z); ``sigma`` and ``R`` are (n_z,). The slices are
    independent, so their tridiagonal systems are stacked into one banded
    solve. Each slice halves its own step (up to 8 times) while the residual
    grows.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    sigma = np.atleast_1d(np.asarray(sigma, dtype=float))
    R = np.atleast_1d(np.asarray(R, dtype=float))
    n_z = R.size
    if Q.shape != (mixture.n_species, n_z) or sigma.shape != (n_z,):
        raise InvalidInputError("Q must be (n_species, n_z) and sigma (n_z,)")
    if not Lambda > 0:
        raise InvalidInputError("Lambda must be positive")
    if np.any(Q < 0):
        raise InvalidInputError("Q must be non-negative")
    charged = np.any((Q > 0) & (mixture.z[:, None] != 0), axis=0)
    if np.any(~charged & (sigma != 0)):
        raise UnsolvableError("wall charge without any mobile charge violates the "
                              "solvability condition")

    s, ws = unit_grid(n_r)
    c = np.arange(n_r - 1) + 0.5
    w = ws[None, :] * R[:, None] ** 2
    R2 = R[:, None]
    sig2 = sigma[:, None]
    phi = np.zeros((n_z, n_r)) if phi_init is None else np.array(phi_init, dtype=float)
    if phi.shape != (n_z, n_r):
        raise InvalidInputError("phi_init must be (n_z, n_r)")
    # slices without mobile charge and without wall charge stay at zero
    active = charged[:, None]
    args = (Q, sig2, R2, Lambda, gamma, mixture, c, w)

    F, dq = _residual(phi, *args)
    F *= active
    norm = np.max(np.abs(F), axis=1)
    for it in range(1, max_iter + 1):
        ab = _jacobian_bands(dq, Lambda, c, w)
        # inactive slices get identity rows; their band entries live in their own columns
        inactive = np.repeat(~charged, n_r)
        ab[:, inactive] = 0.0
        ab[1, inactive] = 1.0
        step = solve_banded((1, 1), ab, -F.ravel()).reshape(n_z, n_r)
        step *= active

        lam = np.ones(n_z)
        for _ in range(MAX_HALVINGS + 1):
            trial = phi + lam[:, None] * step
            with np.errstate(over="ignore", invalid="ignore"):
                F_trial, dq_trial = _residual(trial, *args)
                F_trial *= active
                norm_trial = np.max(np.abs(F_trial), axis=1)
            worse = ~(norm_trial < norm) & (norm > 0)
            worse &= np.max(np.abs(step), axis=1) > tol * (1 + np.max(np.abs(phi), axis=1))
            if not np.any(worse):
                break
            lam = np.where(worse, 0.5 * lam, lam)
        else:
            # accept the smallest step on stubborn slices to keep moving
            trial = phi + lam[:, None] * step
            F_trial, dq_trial = _residual(trial, *args)
            F_trial *= active
            norm_trial = np.max(np.abs(F_trial), axis=1)
        if not np.all(np.isfinite(trial)):
            raise NonConvergenceError("radial Newton produced non-finite values",
                                      trace=[float(np.max(norm))])
        update = np.max(np.abs(trial - phi))
        phi, F, norm, dq = trial, F_trial, norm_trial, dq_trial
        scale = 1.0 + np.max(np.abs(phi))
        if update <= tol * scale:
            return RadialStack(s=s, weights=w, phi_r=phi, residual_norm=norm, iterations=it)
    raise NonConvergenceError(
        f"radial Newton did not converge in {max_iter} iterations "
        f"(last update {update:.3e}, residual {np.max(norm):.3e})",
        trace=[float(np.max(norm))], context={"update": float(update)})


def solve_radial(Q, sigma: float, R: float, Lambda: float, gamma: float, mixture: Mixture,
                 n_r: int = 200, phi_init=None, tol: float = 1e-12,
                 max_iter: int = 100) -> RadialPotential:
    """Single-slice wrapper around :func:`solve_radial_stack`."""
    Q = np.asarray(Q, dtype=float).reshape(mixture.n_species, 1)
    init = None if phi_init is None else np.asarray(phi_init, dtype=float).reshape(1, n_r)
    stack = solve_radial_stack(Q, [sigma], [R], Lambda, gamma, mixture, n_r=n_r,
                               phi_init=init, tol=tol, max_iter=max_iter)
    grid = RadialGrid.uniform(R, n_r)
    phi = stack.phi_r[0]
    comp = slice_composition(Q[:, 0], phi, mixture)
    defect = electroneutrality_defect(comp.q, grid, Lambda, gamma, sigma)
    return RadialPotential(grid=grid, phi_r=phi, zeta=phi - phi[-1],
                           residual_norm=float(stack.residual_norm[0]),
                           electroneutrality_defect=defect, iterations=stack.iterations)


def electroneutrality_defect(q, grid: RadialGrid, Lambda: float, gamma: float,
                             sigma: float) -> float:
    """int_0^R q r dr + Lambda**2 gamma sigma R; zero for a solved slice."""
    return float(grid.integrate(q) + Lambda**2 * gamma * sigma * grid.R)
