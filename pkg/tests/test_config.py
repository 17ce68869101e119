import math

import pytest
from hypothesis import given, settings, strategies as st

from asympnps.config import (PRESET_NAMES, case_from_ini, case_to_ini, load_preset, table_groups)
from asympnps.errors import InvalidInputError, PresetNotFoundError
from asympnps.mixture import Mixture

finite = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_round_trip_bit_identically(name):
    case = load_preset(name)
    text = case_to_ini(case)
    back = case_from_ini(text)
    assert back == case
    assert case_to_ini(back) == text


@settings(max_examples=30, deadline=None)
@given(name=st.sampled_from(PRESET_NAMES), dphi=finite, dp=finite, n=st.floats(1e-3, 3))
def test_overridden_cases_round_trip(name, dphi, dp, n):
    case = load_preset(name).with_overrides(dphi=dphi, dp=dp, nbulk=n)
    assert case_from_ini(case_to_ini(case)) == case


def test_derived_groups_round_to_table_values():
    derived = load_preset("cylinder").groups
    table = load_preset("cylinder", groups="table").groups
    assert table == table_groups(0.1)
    assert derived.Lambda == pytest.approx(table.Lambda, rel=0.07)
    assert derived.gamma == pytest.approx(table.gamma, rel=5e-3)
    assert derived.Pe == pytest.approx(table.Pe, rel=5e-3)


def test_preset_parameters():
    cyl = load_preset("cylinder")
    assert (cyl.geometry.R, cyl.geometry.L, cyl.geometry.sigma0) == (5.0, 25.0, 0.15)
    assert (cyl.geometry.L1, cyl.geometry.L2) == (5.0, 20.0)
    assert cyl.bc.n_out == (0.6, 0.6)
    tr = load_preset("trumpet")
    assert (tr.geometry.R1, tr.geometry.R2, tr.bc.dphi) == (10.0, 1.5, 8.0)
    clya = load_preset("clya")
    assert clya.geometry.sigma0 == -0.55 and load_preset("clya-table").geometry.sigma0 == -0.25
    assert isinstance(clya.mixture.build(), Mixture)
    geo = clya.geometry.build(120)
    # the band of width 1.5 is only three eps wide, so the peak is sigma0 tanh(1.5)
    assert geo.n_z == 120
    assert geo.sigma.min() == pytest.approx(-0.55 * math.tanh(1.5), rel=1e-3)


def test_unknown_preset():
    with pytest.raises(PresetNotFoundError):
        load_preset("nope")
    with pytest.raises(InvalidInputError):
        load_preset("cylinder", groups="other")


def test_overrides():
    case = load_preset("trumpet").with_overrides(a=5.0, dphi=-20.0, nr=50, nz=60, tol=1e-6)
    mix = case.mixture.build()
    assert mix.variant == "mixture" and mix.v[0] == pytest.approx(5 * 0.018)
    assert case.bc.dphi == -20.0
    assert (case.solver.n_r, case.solver.n_z, case.solver.picard_tol) == (50, 60, 1e-6)
    assert load_preset("trumpet").with_overrides(variant="bikerman").mixture.build().variant == "bikerman"
    prof = load_preset("cylinder").with_overrides(geometry="profile:/tmp/x.txt").geometry
    assert prof.kind == "profile" and prof.profile == "/tmp/x.txt"
    with pytest.raises(InvalidInputError):
        load_preset("cylinder").with_overrides(bogus=1.0)


def test_partial_config_overrides_base():
    base = load_preset("cylinder")
    case = case_from_ini("[boundary]\nphi_in = 3.5\n[groups]\nlambda = 0.5\n", base=base)
    assert case.bc.dphi == 3.5 and case.groups.Lambda == 0.5
    assert case.geometry == base.geometry
    rederived = case_from_ini("[scales]\nphi_ref = 0.05\n", base=base)
    assert rederived.groups.Lambda == pytest.approx(base.groups.Lambda * 2**0.5)
    chosen = case_from_ini("[case]\npreset = trumpet\n")
    assert chosen.geometry.kind == "trumpet"


def test_unknown_config_keys_are_rejected():
    with pytest.raises(InvalidInputError):
        case_from_ini("[boundary]\nphi_inn = 1\n")
    with pytest.raises(InvalidInputError):
        case_from_ini("[groups]\nkappa = 1\n")
    with pytest.raises(InvalidInputError):
        case_from_ini("[geometry]\nkind = sphere\n")
