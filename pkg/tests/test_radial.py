import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import solve_bvp
from scipy.special import i0e, i1e

from asympnps.errors import InvalidInputError, UnsolvableError
from asympnps.mixture import Mixture, boundary_factors, charge_density
from asympnps.radial import RadialGrid, solve_radial, solve_radial_stack, unit_grid

CLASSICAL = Mixture.binary(1.33, 0.79)
SOLVATED = Mixture.binary(1.334, 2.032, variant="mixture", a=4.15, v=0.075)
LAMBDA, GAMMA = 0.4243, 9.209


def test_unit_grid_weights_integrate_polynomials():
    s, w = unit_grid(201)
    assert np.sum(w) == pytest.approx(0.5, rel=1e-14)
    # second order for smooth integrands
    assert np.sum(w * s**2) == pytest.approx(0.25, rel=1e-4)
    grid = RadialGrid.uniform(2.0, 201)
    assert grid.integrate(np.ones(201)) == pytest.approx(2.0, rel=1e-14)


@pytest.mark.parametrize("R, Lambda, n", [(1.0, 0.4, 1.0), (5.0, 0.4243, 0.6), (2.0, 0.8, 0.1)])
def test_debye_hueckel_limit(R, Lambda, n):
    gs = 1e-4
    res = solve_radial([n, n], gs / GAMMA, R, Lambda, GAMMA, CLASSICAL, n_r=2001)
    kappa = np.sqrt(2 * n) / Lambda
    r = res.grid.r
    # scaled Bessel functions avoid overflow: I0(kr)/I1(kR) = i0e(kr)/i1e(kR) e^{k(r-R)}
    exact = gs * i0e(kappa * r) / (kappa * i1e(kappa * R)) * np.exp(kappa * (r - R))
    np.testing.assert_allclose(res.phi_r, exact, rtol=1e-4, atol=1e-4 * exact.max())


@pytest.mark.parametrize("mix", [CLASSICAL, SOLVATED], ids=["classical", "mixture"])
def test_nonlinear_slice_matches_collocation_solver(mix):
    R, sigma = 3.0, 0.4
    Q = boundary_factors(np.array([0.5, 0.5]), mix)

    def rhs(r, y):
        q = charge_density(Q, y[0], mix)
        return np.vstack([y[1], -q / LAMBDA**2])

    S = np.array([[0.0, 0.0], [0.0, -1.0]])
    r0 = np.linspace(0, R, 400)
    guess = np.vstack([GAMMA * sigma * r0**2 / (2 * R), GAMMA * sigma * r0 / R])
    ref = solve_bvp(rhs, lambda ya, yb: np.array([ya[1], yb[1] - GAMMA * sigma]), r0, guess,
                    S=S, tol=1e-10, max_nodes=200000)
    assert ref.success
    res = solve_radial(Q, sigma, R, LAMBDA, GAMMA, mix, n_r=1601)
    expected = ref.sol(res.grid.r)[0]
    assert np.max(np.abs(res.phi_r - expected)) < 1e-4 * np.max(np.abs(expected))


@settings(max_examples=25, deadline=None)
@given(sigma=st.floats(-2, 2), R=st.floats(0.5, 10), n=st.floats(0.05, 3))
def test_electroneutrality_property(sigma, R, n):
    res = solve_radial([n, n], sigma, R, LAMBDA, GAMMA, CLASSICAL, n_r=101)
    assert abs(res.electroneutrality_defect) < 1e-8 * max(1, LAMBDA**2 * GAMMA * abs(sigma) * R)


@settings(max_examples=20, deadline=None)
@given(sigma=st.floats(0.01, 2), n=st.floats(0.05, 3))
def test_sign_convention_and_antisymmetry(sigma, n):
    plus = solve_radial([n, n], sigma, 2.0, LAMBDA, GAMMA, CLASSICAL, n_r=101)
    minus = solve_radial([n, n], -sigma, 2.0, LAMBDA, GAMMA, CLASSICAL, n_r=101)
    np.testing.assert_allclose(plus.phi_r, -minus.phi_r, atol=1e-10)
    # a positive wall charge raises the potential at the wall and attracts anions
    assert np.all(plus.zeta <= 1e-14)
    assert plus.phi_r[-1] > plus.phi_r[0]


def test_uncharged_slice_is_flat():
    res = solve_radial([1.0, 1.0], 0.0, 5.0, LAMBDA, GAMMA, CLASSICAL, n_r=51)
    assert np.max(np.abs(res.phi_r)) < 1e-14


def test_second_order_convergence():
    def zeta_int(n_r):
        res = solve_radial([0.6, 0.6], 0.15, 5.0, LAMBDA, GAMMA, CLASSICAL, n_r=n_r)
        return res.grid.integrate(res.zeta)

    v = [zeta_int(n) for n in (51, 101, 201, 401)]
    ratios = [abs(v[i] - v[i + 1]) / abs(v[i + 1] - v[i + 2]) for i in range(2)]
    assert all(np.log2(r) > 1.8 for r in ratios)


def test_stack_matches_independent_slices():
    Q = np.array([[0.5, 1.0, 2.0], [0.5, 1.0, 2.0]])
    sigma = np.array([0.1, -0.3, 0.0])
    R = np.array([1.0, 2.0, 3.0])
    stack = solve_radial_stack(Q, sigma, R, LAMBDA, GAMMA, CLASSICAL, n_r=81)
    for j in range(3):
        single = solve_radial(Q[:, j], sigma[j], R[j], LAMBDA, GAMMA, CLASSICAL, n_r=81)
        np.testing.assert_allclose(stack.phi_r[j], single.phi_r, atol=1e-12)


def test_wall_charge_without_ions_is_unsolvable():
    with pytest.raises(UnsolvableError):
        solve_radial([0.0, 0.0], 0.1, 1.0, LAMBDA, GAMMA, CLASSICAL)
    # without wall charge an empty slice is fine
    assert np.all(solve_radial([0.0, 0.0], 0.0, 1.0, LAMBDA, GAMMA, CLASSICAL).phi_r == 0)


def test_input_validation():
    with pytest.raises(InvalidInputError):
        solve_radial([1.0, 1.0], 0.1, 1.0, 0.0, GAMMA, CLASSICAL)
    with pytest.raises(InvalidInputError):
        solve_radial_stack(np.ones((2, 3)), np.zeros(2), np.ones(3), LAMBDA, GAMMA, CLASSICAL)
    with pytest.raises(InvalidInputError):
        RadialGrid.uniform(-1.0, 10)
