import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from asympnps.axial import (AxialPotential, TransportClosure, axial_potential, bernoulli,
                            closure_integrals, face_fluxes, solve_axial)
from asympnps.errors import StateError
from asympnps.geometry import make_cylinder, make_trumpet
from asympnps.mixture import Mixture
from asympnps.units import BoundaryConditions

MIX = Mixture.binary(1.33, 0.79)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(-50, 50))
def test_bernoulli_identities(x):
    # B(x) - B(-x) = -x and B(x) > 0
    assert bernoulli(x) - bernoulli(-x) == pytest.approx(-x, rel=1e-12, abs=1e-14)
    assert bernoulli(x) > 0


def test_bernoulli_is_smooth_at_zero():
    x = np.array([-1e-5, -1e-7, 0.0, 1e-7, 1e-5])
    np.testing.assert_allclose(bernoulli(x), x / np.expm1(np.where(x == 0, 1, x)) * (x != 0)
                               + (x == 0), rtol=1e-10)


def test_axial_potential_cylinder_is_linear():
    geo = make_cylinder(2.0, 10.0, 51)
    pot = axial_potential(BoundaryConditions.bulk(1.0, dphi=3.0), geo)
    np.testing.assert_allclose(pot.phi_z, 0.3 * geo.z, atol=1e-14)
    np.testing.assert_allclose(pot.dphi_z, 0.3, rtol=1e-14)


def test_axial_potential_trumpet_current_is_conserved():
    geo = make_trumpet(10.0, 1.5, 10.0, 201)
    pot = axial_potential(BoundaryConditions.bulk(1.0, dphi=8.0), geo)
    # R^2 phi_z' is constant along the pore
    np.testing.assert_allclose(geo.R**2 * pot.dphi_z, (geo.R**2 * pot.dphi_z)[0], rtol=1e-12)
    assert pot.phi_z[0] == 0.0 and pot.phi_z[-1] == pytest.approx(8.0)


def _uniform_closure(n_z, H1=0.5, H2=0.0):
    return TransportClosure(H1=np.full((2, n_z), H1), H2=np.full((2, n_z), H2))


@pytest.mark.parametrize("dphi", [0.0, 2.0, -15.0])
def test_constant_drift_is_solved_exactly(dphi):
    """Q' + z E Q = J/(k H1) has the solution J/(k H1 z E) + C exp(-z E s)."""
    L, n_z = 10.0, 41
    geo = make_cylinder(1.0, L, n_z)
    pot = axial_potential(BoundaryConditions.bulk(1.0, dphi=dphi), geo)
    Q_out, Q_in = np.array([1.0, 0.5]), np.array([2.0, 3.0])
    fac = solve_axial(_uniform_closure(n_z), pot, geo, Q_out, Q_in, MIX, Pe=0.0)
    E = dphi / L
    for a, zc in enumerate(MIX.z):
        if E == 0:
            exact = Q_out[a] + (Q_in[a] - Q_out[a]) * geo.z / L
        else:
            decay = np.exp(-zc * E * geo.z)
            C = (Q_in[a] - Q_out[a]) / (decay[-1] - 1.0)
            exact = Q_out[a] - C + C * decay
        np.testing.assert_allclose(fac.Q[a], exact, rtol=1e-10, atol=1e-12)


def test_advection_enters_as_effective_drift():
    n_z = 31
    geo = make_cylinder(1.0, 5.0, n_z)
    pot = axial_potential(BoundaryConditions.bulk(1.0), geo)
    Pe, H1, H2 = 2.0, 0.5, 0.3
    fac = solve_axial(_uniform_closure(n_z, H1, H2), pot, geo, np.ones(2), 2 * np.ones(2), MIX, Pe)
    for a, k in enumerate(MIX.k):
        v = Pe * H2 / (k * H1)  # Q' - v Q = const
        grow = np.exp(v * geo.z)
        exact = 1.0 + (2.0 - 1.0) * (grow - 1.0) / (grow[-1] - 1.0)
        np.testing.assert_allclose(fac.Q[a], exact, rtol=1e-10)


def test_flux_is_constant_on_faces():
    geo = make_trumpet(10.0, 1.5, 10.0, 101)
    pot = axial_potential(BoundaryConditions.bulk(1.0, dphi=5.0), geo)
    rng = np.random.default_rng(3)
    closure = TransportClosure(H1=geo.R**2 / 2 * (1 + 0.1 * rng.random((2, 101))),
                               H2=0.1 * rng.random((2, 101)))
    fac = solve_axial(closure, pot, geo, np.ones(2), np.ones(2), MIX, Pe=1.0)
    np.testing.assert_allclose(fac.flux, fac.flux[:, :1] * np.ones_like(fac.flux), rtol=1e-10)
    again = face_fluxes(fac.Q, geo.z, closure, np.diff(pot.phi_z) / np.diff(geo.z), MIX, 1.0)
    np.testing.assert_allclose(again, fac.flux, rtol=1e-12)


def test_closure_integrals_of_uniform_fields():
    n_z, n_r = 3, 5
    A = np.ones((2, n_z, n_r))
    E = np.ones((2, n_z, n_r))
    w = np.full((n_z, n_r), 0.1)
    c = closure_integrals(A, E, w, u=2 * np.ones((n_z, n_r)))
    np.testing.assert_allclose(c.H1, 0.5)
    np.testing.assert_allclose(c.H2, 1.0)
    assert np.all(closure_integrals(A, E, w).H2 == 0)


def test_nonpositive_closure_is_rejected():
    geo = make_cylinder(1.0, 1.0, 20)
    pot = AxialPotential(phi_z=np.zeros(20), dphi_z=np.zeros(20))
    bad = TransportClosure(H1=np.zeros((2, 20)), H2=np.zeros((2, 20)))
    with pytest.raises(StateError):
        solve_axial(bad, pot, geo, np.ones(2), np.ones(2), MIX, 0.0)
