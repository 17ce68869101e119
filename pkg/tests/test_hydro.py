from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import quad

from asympnps import hydro
from asympnps.coupler import Problem, solve_steady
from asympnps.geometry import make_cylinder, make_trumpet, tanh_surface_charge, trumpet_radius
from asympnps.mixture import Mixture
from asympnps.units import BoundaryConditions, DimensionlessGroups, SolverConfig

GROUPS = DimensionlessGroups(Lambda=0.4243, gamma=9.209, Pe=2.784, delta=0.1)
MIX = Mixture.binary(1.33, 0.79)
CONFIG = SolverConfig(n_r=81, n_z=161)


def test_dz_at_fixed_r_of_radial_function_vanishes():
    geo = make_trumpet(4.0, 1.0, 10.0, 201)
    s = np.linspace(0, 1, 51)
    r = s[None, :] * geo.R[:, None]
    f = r**2  # depends on r only
    d = hydro.dz_at_fixed_r(f, s, geo)
    assert np.max(np.abs(d)) < 1e-2 * np.max(np.abs(np.gradient(f, geo.z, axis=0)))
    g = np.broadcast_to(geo.z[:, None] ** 2, r.shape)
    np.testing.assert_allclose(hydro.dz_at_fixed_r(g, s, geo), 2 * geo.z[:, None] * np.ones_like(r),
                               atol=1e-10)


def test_pressure_driven_flow_through_trumpet():
    """Flow rate dp / (16 int R^-4 dz), identical on every slice."""
    geo = make_trumpet(10.0, 1.5, 10.0, 401)
    prob = Problem(geo, MIX, BoundaryConditions.bulk(1.0, dp=2.0), GROUPS,
                   SolverConfig(n_r=81, n_z=401))
    sol = solve_steady(prob)
    Ip, _ = quad(lambda z: trumpet_radius(z, 10.0, 1.5, 10.0) ** -4, 0, 10, points=[5.0],
                 epsabs=0, epsrel=1e-12)
    np.testing.assert_allclose(sol.flow_rate, 2.0 / (16 * Ip), rtol=5e-3)
    assert np.ptp(sol.flow_rate) < 1e-9 * abs(sol.flow_rate[0])
    assert np.all(sol.u[:, -1] == 0)


def test_uniformly_charged_pore_gives_smoluchowski_profile():
    """With z-independent fields the double-layer kernels vanish and u = -Lambda^2 phi_z' zeta."""
    geo = make_cylinder(3.0, 10.0, CONFIG.n_z).with_sigma(0.2)
    groups = replace(GROUPS, Pe=0.0)
    sol = solve_steady(Problem(geo, MIX, BoundaryConditions.bulk(1.0, dphi=-2.0), groups, CONFIG))
    expected = -groups.Lambda**2 * (-2.0 / 10.0) * sol.zeta
    np.testing.assert_allclose(sol.u, expected, atol=1e-10 * np.max(np.abs(expected)))


def test_pressure_boundary_values_and_continuity():
    geo = make_trumpet(4.0, 2.0, 10.0, CONFIG.n_z)
    geo = tanh_surface_charge(geo, 0.5, 2.0, 8.0, 1.0)
    bc = BoundaryConditions(n_out=(1.0, 1.0), n_in=(1.0, 1.0), phi_in=2.0, p_out=0.3, p_in=0.5)
    sol = solve_steady(Problem(geo, MIX, bc, GROUPS, CONFIG))
    assert sol.pressure.p_z[0] == pytest.approx(-0.3)
    assert sol.pressure.p_z[-1] == pytest.approx(-0.5)
    assert sol.pressure.Psi[0] == 0 and sol.pressure.K4[-1] == pytest.approx(0, abs=1e-12)
    # the continuity-based radial velocity nearly vanishes at the wall
    w_wall = sol.flow.w[:, -1]
    assert np.max(np.abs(w_wall)) < 1e-2 * np.max(np.abs(sol.flow.w))


def test_flow_rate_quadrature():
    w = np.array([[0.25, 0.25]])
    assert hydro.flow_rate(np.array([[2.0, 2.0]]), w)[0] == pytest.approx(1.0)
