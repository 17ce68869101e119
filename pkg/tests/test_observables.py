import numpy as np
import pytest

from asympnps import load_preset, observables as obs, solve_steady
from asympnps.errors import InvalidInputError, UnsupportedGeometryError


def cylinder(**kw):
    return load_preset("cylinder").with_overrides(**kw)


@pytest.fixture(scope="module")
def eof():
    return solve_steady(cylinder(dphi=-8.0).problem())


def test_uncharged_flow_is_pure_poiseuille():
    case = load_preset("general").with_overrides(dp=0.5, dphi=2.0)
    d = obs.flow_decomposition(solve_steady(case.problem()))
    assert abs(d.HS) < 1e-14 and abs(d.EDL) < 1e-12
    assert d.PF == pytest.approx(0.5 * 5.0**4 / 16)
    # second-order radial quadrature of the parabola at n_r = 200
    assert d.total == pytest.approx(d.PF, rel=1e-4)


def test_double_layer_flow_is_small_at_preset_concentration(eof):
    d = obs.flow_decomposition(eof)
    assert abs(d.EDL) < 1e-2 * abs(d.HS)
    assert d.defect < 1e-4 * abs(d.total)
    # electro-osmosis carries the fluid toward the outlet for dphi < 0 and <zeta> < 0
    assert d.HS < 0 and obs.zeta_mean(eof) < 0


def test_zero_flow_condition():
    ref = solve_steady(cylinder(dphi=-8.0).problem())
    C_u = obs.flow_coefficient(ref.problem.groups, 5.0, 25.0)
    dp = C_u * obs.zeta_mean(ref) * -8.0
    sol = solve_steady(cylinder(dphi=-8.0, dp=dp).problem())
    d = obs.flow_decomposition(sol)
    # what remains is the double-layer part
    assert abs(d.total) < 3 * abs(d.EDL) + 1e-3 * abs(d.PF)


def test_current_decomposition_matches_solved_current():
    sol = solve_steady(cylinder(dphi=1.0, dp=0.05).problem())
    d = obs.current_decomposition(sol)
    np.testing.assert_allclose(d.total, d.actual, rtol=0.15)
    # the cation threshold is the pressure per volt where I_E + I_P vanishes
    sol0 = solve_steady(cylinder(dphi=1.0, dp=d.threshold[0]).problem())
    d0 = obs.current_decomposition(sol0)
    assert abs(d0.I_E[0] + d0.I_P[0]) < 1e-2 * abs(d0.I_E[0])


def test_decomposition_at_rest_vanishes():
    d = obs.current_decomposition(solve_steady(cylinder(nr=61, nz=61).problem()))
    for part in (d.I_E, d.I_P, d.I_C, d.actual):
        np.testing.assert_allclose(part, 0.0, atol=1e-12)


def test_decompositions_need_a_cylinder():
    sol = solve_steady(load_preset("trumpet").with_overrides(nr=41, nz=41, dphi=1.0).problem())
    with pytest.raises(UnsupportedGeometryError):
        obs.flow_decomposition(sol)
    with pytest.raises(UnsupportedGeometryError):
        obs.current_decomposition(sol)


def test_transport_metrics(eof):
    m = obs.transport_metrics(eof)
    assert m.t.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(m.conductance, m.currents / -8.0)
    assert m.Q_eo == pytest.approx(-2 * np.pi * eof.flow_rate[0])
    assert m.Q_eo > 0  # fluid leaves through the z = 0 end


def test_transport_numbers_undefined_without_current():
    sol = solve_steady(cylinder(nr=41, nz=41).problem())
    with pytest.raises(InvalidInputError):
        obs.transport_metrics(sol)
    assert np.isnan(obs.summary(sol)["t_+"])


def test_summary_keys_are_stable(eof):
    keys = list(obs.summary(eof))
    assert keys[:8] == ["dphi", "dp", "n_bulk", "zeta_mean", "u_mean", "u_max", "z_u_max", "Q_eo"]
    assert {"I_+", "I_-", "I", "t_+", "t_-", "C_u", "converged"} <= set(keys)
