"""Fixed-point coupling of the radial, axial and hydrodynamic sub-problems.

Each sweep solves the radial Poisson problem on every slice with the current
Q, updates the velocity when the flow feeds back into transport (Pe > 0),
rebuilds the transport closure and solves the axial equation for a new Q.
The sweep is a map Q -> G(Q); successive iterates are combined by Anderson
mixing (plain relaxed Picard when the history depth is 0). The loop stops
once the max-norm change of Q drops below ``picard_tol``.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from . import hydro
from .axial import (AxialFactors, AxialPotential, TransportClosure, axial_potential,
                    closure_integrals, face_fluxes, solve_axial)
from .errors import InvalidInputError, NonConvergenceError
from .geometry import PoreGeometry
from .mixture import Composition, Mixture, boundary_factors, slice_composition
from .radial import RadialStack, solve_radial_stack
from .units import BoundaryConditions, DimensionlessGroups, SolverConfig

logger = logging.getLogger(__name__)

MIN_RELAXATION = 1.0 / 64.0


@dataclass(frozen=True, eq=False)
class Problem:
    geometry: PoreGeometry
    mixture: Mixture
    bc: BoundaryConditions
    groups: DimensionlessGroups
    config: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if len(self.bc.n_out) != self.mixture.n_species:
            raise InvalidInputError("boundary data must list one concentration per species")

    @property
    def Q_out(self) -> np.ndarray:
        return boundary_factors(np.array(self.bc.n_out), self.mixture)

    @property
    def Q_in(self) -> np.ndarray:
        return boundary_factors(np.array(self.bc.n_in), self.mixture)


@dataclass(frozen=True, eq=False)
class SteadySolution:
    problem: Problem
    radial: RadialStack
    composition: Composition
    potential: AxialPotential
    closure: TransportClosure
    factors: AxialFactors
    kernels: hydro.EDLKernels
    pressure: hydro.PressureField
    flow: hydro.VelocityField
    err_trace: list
    converged: bool
    elapsed: float = 0.0

    @property
    def geometry(self) -> PoreGeometry:
        return self.problem.geometry

    @property
    def s(self) -> np.ndarray:
        return self.radial.s

    @property
    def r(self) -> np.ndarray:
        return self.radial.s[None, :] * self.geometry.R[:, None]

    @property
    def weights(self) -> np.ndarray:
        return self.radial.weights

    @property
    def Q(self) -> np.ndarray:
        return self.factors.Q

    @property
    def phi_r(self) -> np.ndarray:
        return self.radial.phi_r

    @property
    def phi(self) -> np.ndarray:
        return self.radial.phi_r + self.potential.phi_z[:, None]

    @property
    def zeta(self) -> np.ndarray:
        return self.radial.zeta

    @property
    def u(self) -> np.ndarray:
        return self.flow.u

    @property
    def iterations(self) -> int:
        return len(self.err_trace)

    @property
    def face_z(self) -> np.ndarray:
        z = self.geometry.z
        return 0.5 * (z[1:] + z[:-1])

    @property
    def currents(self) -> np.ndarray:
        """Species currents 2 pi z J on every face, (n_species, n_z - 1)."""
        return 2.0 * np.pi * self.problem.mixture.z[:, None] * self.factors.flux

    @property
    def flow_rate(self) -> np.ndarray:
        """int_0^R u r dr on every slice."""
        return hydro.flow_rate(self.flow.u, self.weights)


def _hydrodynamics(Q, comp: Composition, radial: RadialStack, pot: AxialPotential,
                   problem: Problem, with_w: bool = False):
    geo, groups, bc = problem.geometry, problem.groups, problem.bc
    s = radial.s
    zeta = radial.zeta
    kernels = hydro.edl_kernels(Q, comp.A, comp.E, s, radial.weights, zeta, pot.dphi_z,
                                geo, groups.Lambda)
    p_r, Qcheck = hydro.pressure_radial(Q, comp.A, comp.E, s)
    p_z, dp_z, Psi, K4 = hydro.pressure_axial(kernels, geo, bc.p_out, bc.p_in, pot.dphi_z,
                                              groups.Lambda)
    u = hydro.velocity(dp_z, pot.dphi_z, zeta, kernels.K2, s, geo, groups.Lambda)
    w = hydro.radial_velocity(u, s, geo) if with_w else None
    pressure = hydro.PressureField(p_r=p_r, p_z=p_z, dp_z=dp_z, Qcheck=Qcheck, Psi=Psi, K4=K4)
    return kernels, pressure, hydro.VelocityField(u=u, w=w)


def _radial(Q, problem: Problem, phi_init):
    geo, groups, cfg = problem.geometry, problem.groups, problem.config
    return solve_radial_stack(Q, geo.sigma, geo.R, groups.Lambda, groups.gamma, problem.mixture,
                              n_r=cfg.n_r, phi_init=phi_init, tol=cfg.newton_tol,
                              max_iter=cfg.newton_max_iter)


class AndersonMixer:
    """Windowed Anderson mixing for the fixed point Q = G(Q).

    ``depth = 0`` reduces to relaxed Picard, Q <- Q + beta (G - Q).
    """

    def __init__(self, depth: int, beta: float):
        self.depth = depth
        self.beta = beta
        self.reset()

    def reset(self):
        self._dx, self._df = [], []
        self._last = None

    def update(self, x, g):
        f = (g - x).ravel()
        xf = x.ravel()
        if self.depth == 0:
            return x + self.beta * (g - x)
        if self._last is not None:
            x_prev, f_prev = self._last
            self._dx.append(xf - x_prev)
            self._df.append(f - f_prev)
            if len(self._dx) > self.depth:
                self._dx.pop(0)
                self._df.pop(0)
        self._last = (xf.copy(), f.copy())
        step = self.beta * f
        if self._dx:
            dF = np.column_stack(self._df)
            dX = np.column_stack(self._dx)
            coef, *_ = np.linalg.lstsq(dF, f, rcond=None)
            step = step - (dX + self.beta * dF) @ coef
        return (xf + step).reshape(x.shape)


def solve_steady(problem: Problem, initial: SteadySolution | None = None) -> SteadySolution:
    """Iterate the sub-solvers to a self-consistent steady state.

    Starts from Q interpolated linearly between the boundary data, phi_r = 0
    and u = 0 unless ``initial`` supplies a previous solution. Raises
    :class:`NonConvergenceError` at the iteration cap; the error's
    ``context['solution']`` holds the last iterate.
    """
    t0 = time.perf_counter()
    geo, mixture, cfg = problem.geometry, problem.mixture, problem.config
    Pe = problem.groups.Pe
    Q_out, Q_in = problem.Q_out, problem.Q_in
    pot = axial_potential(problem.bc, geo)
    if initial is not None:
        Q = initial.Q.copy()
        phi = initial.phi_r.copy()
    else:
        t = geo.z / geo.L
        Q = Q_out[:, None] * (1.0 - t) + Q_in[:, None] * t
        phi = None

    omega = cfg.relaxation
    state = {"phi": phi, "u": None}

    def sweep(Q):
        radial = _radial(Q, problem, state["phi"])
        state["phi"] = radial.phi_r
        comp = slice_composition(Q, radial.phi_r, mixture)
        if Pe > 0:
            # the velocity is a function of Q, so the map iterated is Q -> G(Q)
            _, _, flow = _hydrodynamics(Q, comp, radial, pot, problem)
            state["u"] = flow.u
        closure = closure_integrals(comp.A, comp.E, radial.weights, state["u"])
        new = solve_axial(closure, pot, geo, Q_out, Q_in, mixture, Pe, Q_old=Q,
                          pseudo_time=cfg.pseudo_time)
        return new.Q

    mixer = AndersonMixer(cfg.acceleration_depth, omega)
    trace: list[float] = []
    converged = False
    for it in range(cfg.picard_max_iter):
        G = sweep(Q)
        err = float(np.max(np.abs(G - Q)))
        trace.append(err)
        logger.debug("sweep %d: err = %.3e", it + 1, err)
        if err < cfg.picard_tol:
            Q = G
            converged = True
            break
        if len(trace) > 1 and err > trace[-2]:
            if mixer.depth == 0 and mixer.beta > MIN_RELAXATION:
                mixer.beta = max(0.5 * mixer.beta, MIN_RELAXATION)
                logger.debug("residual increased, relaxation now %g", mixer.beta)
            elif err > 10.0 * min(trace):
                # stale history is steering away from the fixed point
                mixer.reset()
        mixed = mixer.update(Q, G)
        if np.all(mixed > 0):
            Q = mixed
        else:
            # extrapolation left the admissible set; take the plain step instead
            mixer.reset()
            Q = Q + mixer.beta * (G - Q)
    phi = state["phi"]

    # final pass: every field evaluated from the same Q
    radial = _radial(Q, problem, phi)
    comp = slice_composition(Q, radial.phi_r, mixture)
    kernels, pressure, flow = _hydrodynamics(Q, comp, radial, pot, problem, with_w=True)
    closure = closure_integrals(comp.A, comp.E, radial.weights, flow.u if Pe > 0 else None)
    h = np.diff(geo.z)
    flux = face_fluxes(Q, geo.z, closure, np.diff(pot.phi_z) / h, mixture, Pe)
    factors = AxialFactors(Q=Q, dQdz=np.gradient(Q, geo.z, axis=1, edge_order=2), flux=flux,
                           negative=bool(np.any(Q < 0)))
    solution = SteadySolution(problem=problem, radial=radial, composition=comp, potential=pot,
                              closure=closure, factors=factors, kernels=kernels,
                              pressure=pressure, flow=flow, err_trace=trace,
                              converged=converged and not factors.negative,
                              elapsed=time.perf_counter() - t0)
    if not converged:
        raise NonConvergenceError(
            f"fixed-point iteration stalled after {len(trace)} sweeps (err = {trace[-1]:.3e})",
            trace=trace, context={"solution": solution})
    logger.info("converged in %d sweeps (%.2f s)", len(trace), solution.elapsed)
    return solution
