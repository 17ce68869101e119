"""Case descriptions, the built-in presets and their INI serialisation.

A :class:`CaseSpec` fully determines one steady problem. Presets are named
cases. Config files are flat INI files whose keys follow the symbol names
(``lambda``, ``gamma``, ``pe``, ``n_out``, ...). Floats are written with
``repr`` so a round trip through a file is bit-identical.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .coupler import Problem
from .errors import InvalidInputError, PresetNotFoundError
from .geometry import (PoreGeometry, clya_profile_table, make_cylinder, make_flared_profile,
                       make_trumpet, read_profile, tanh_surface_charge)
from .mixture import Mixture
from .units import (BoundaryConditions, DimensionlessGroups, ReferenceScales, SolverConfig,
                    derive_groups)

GEOMETRY_KINDS = ("cylinder", "trumpet", "profile")


@dataclass(frozen=True)
class GeometrySpec:
    """Pore shape and wall-charge pattern.

    ``profile`` is a path to a two-column table, or empty for the bundled
    ClyA profile. A profile is embedded between linear reservoir flares of
    radius ``R_reservoir`` at z = 0 and z = L.
    """

    kind: str = "cylinder"
    L: float = 25.0
    R: float = 5.0
    R1: float = 10.0
    R2: float = 1.5
    R_reservoir: float = 5.0
    profile: str = ""
    sigma0: float = 0.0
    L1: float = 0.0
    L2: float = 25.0
    eps: float = 1.0

    def __post_init__(self):
        if self.kind not in GEOMETRY_KINDS:
            raise InvalidInputError(f"unknown geometry {self.kind!r}, expected one of {GEOMETRY_KINDS}")

    def build(self, n_z: int) -> PoreGeometry:
        if self.kind == "cylinder":
            geo = make_cylinder(self.R, self.L, n_z)
        elif self.kind == "trumpet":
            geo = make_trumpet(self.R1, self.R2, self.L, n_z)
        else:
            table = read_profile(self.profile) if self.profile else clya_profile_table()
            geo = make_flared_profile(table, self.L, self.R_reservoir, n_z)
        if self.sigma0 == 0:
            return geo
        return tanh_surface_charge(geo, self.sigma0, self.L1, self.L2, self.eps)


@dataclass(frozen=True)
class MixtureSpec:
    """Monovalent binary salt; ``variant`` 'auto' picks the model from ``a``."""

    k_plus: float = 1.33
    k_minus: float = 0.79
    variant: str = "auto"
    a: float = 0.0
    v0: float = 0.018
    v: float = 0.0  # 0 means a * v0

    def build(self) -> Mixture:
        v = self.v if self.v > 0 else None
        return Mixture.binary(self.k_plus, self.k_minus, variant=self.variant,
                              a=self.a, v0=self.v0, v=v)


@dataclass(frozen=True)
class CaseSpec:
    name: str
    scales: ReferenceScales
    groups: DimensionlessGroups
    mixture: MixtureSpec
    bc: BoundaryConditions
    geometry: GeometrySpec
    solver: SolverConfig = field(default_factory=SolverConfig)
    notes: str = ""

    def problem(self) -> Problem:
        return Problem(geometry=self.geometry.build(self.solver.n_z), mixture=self.mixture.build(),
                       bc=self.bc, groups=self.groups, config=self.solver)

    def with_overrides(self, **kw) -> "CaseSpec":
        """Apply the command-line style overrides ``dphi``, ``dp``, ``nbulk``,
        ``a``, ``variant``, ``geometry``, ``nr``, ``nz`` and ``tol``; None
        entries are ignored."""
        case = self
        kw = {k: v for k, v in kw.items() if v is not None}
        bc = case.bc
        if "nbulk" in kw:
            n = float(kw.pop("nbulk"))
            bc = replace(bc, n_out=(n,) * len(bc.n_out), n_in=(n,) * len(bc.n_in))
        if "dphi" in kw:
            bc = replace(bc, phi_in=bc.phi_out + float(kw.pop("dphi")))
        if "dp" in kw:
            bc = replace(bc, p_in=bc.p_out + float(kw.pop("dp")))
        mix = case.mixture
        if "a" in kw:
            a = float(kw.pop("a"))
            mix = replace(mix, a=a, v=0.0, variant="auto")
        if "variant" in kw:
            variant = kw.pop("variant")
            mix = replace(mix, variant=variant, a=mix.a if variant == "mixture" else
                          (1.0 if variant == "bikerman" else 0.0))
        geo = case.geometry
        if "geometry" in kw:
            geo = _geometry_override(geo, kw.pop("geometry"))
        solver = case.solver
        if "nr" in kw or "nz" in kw:
            solver = solver.with_resolution(int(kw.pop("nr", solver.n_r)),
                                            int(kw.pop("nz", solver.n_z)))
        if "tol" in kw:
            solver = replace(solver, picard_tol=float(kw.pop("tol")))
        if kw:
            raise InvalidInputError(f"unknown overrides: {sorted(kw)}")
        return replace(case, bc=bc, mixture=mix, geometry=geo, solver=solver)


def _geometry_override(geo: GeometrySpec, choice: str) -> GeometrySpec:
    if choice.startswith("profile:"):
        return replace(geo, kind="profile", profile=choice.split(":", 1)[1])
    if choice == "profile":
        return replace(geo, kind="profile", profile="")
    return replace(geo, kind=choice)


# Reference scales shared by every preset. A reference potential of 0.025 V
# reproduces the rounded groups Lambda = 0.4, gamma = 9.23 and Pe = 2.78.
TABLE_PHI_REF = 0.025
D_REF = 1e-9


def _scales(L0: float) -> ReferenceScales:
    return ReferenceScales(L0=L0, R0=1e-9, tau=L0**2 / D_REF, cR=1.0, sigmaR=0.16, T=298.15,
                           nu=0.8904e-3, epsR=78.49, phi_ref=TABLE_PHI_REF)


def table_groups(delta: float) -> DimensionlessGroups:
    """Rounded group values as printed in the parameter tables."""
    return DimensionlessGroups(Lambda=0.4, gamma=9.23, Pe=2.78, delta=delta)


def _general() -> CaseSpec:
    scales = _scales(1e-8)
    return CaseSpec(
        name="general", scales=scales, groups=derive_groups(scales),
        mixture=MixtureSpec(), bc=BoundaryConditions.bulk(1.0),
        geometry=GeometrySpec(kind="cylinder", L=25.0, R=5.0),
        notes="shared reference scales; uncharged default cylinder")


def _cylinder() -> CaseSpec:
    scales = _scales(1e-8)
    L = 25.0
    return CaseSpec(
        name="cylinder", scales=scales, groups=derive_groups(scales),
        mixture=MixtureSpec(k_plus=1.33, k_minus=0.79, a=0.0),
        bc=BoundaryConditions.bulk(0.6),
        geometry=GeometrySpec(kind="cylinder", L=L, R=5.0, sigma0=0.15, L1=0.2 * L,
                              L2=L - 0.2 * L, eps=5.0),
        notes="electro-osmotic flow transitions in a straight pore")


def _trumpet() -> CaseSpec:
    scales = _scales(1e-7)
    L = 10.0
    return CaseSpec(
        name="trumpet", scales=scales, groups=derive_groups(scales),
        mixture=MixtureSpec(k_plus=1.33, k_minus=0.79, a=0.0),
        bc=BoundaryConditions.bulk(0.1, dphi=8.0),
        geometry=GeometrySpec(kind="trumpet", L=L, R1=10.0, R2=1.5, sigma0=1.0, L1=0.1 * L,
                              L2=L - 0.1 * L, eps=8.0),
        notes="parabolic constriction; --a 1 and --a 5 use v0 = 0.018, v = a v0")


def _clya() -> CaseSpec:
    scales = _scales(1e-8)
    return CaseSpec(
        name="clya", scales=scales, groups=derive_groups(scales),
        mixture=MixtureSpec(k_plus=1.334, k_minus=2.032, variant="mixture", a=4.15,
                            v0=0.018, v=0.075),
        bc=BoundaryConditions.bulk(1.0),
        geometry=GeometrySpec(kind="profile", L=5.5, R_reservoir=5.0, profile="",
                              sigma0=-0.55, L1=2.0, L2=3.5, eps=0.5),
        notes="protein pore between flared reservoirs; table sigma0 = -0.25 under 'clya-table'")


def _clya_table() -> CaseSpec:
    case = _clya()
    return replace(case, name="clya-table", geometry=replace(case.geometry, sigma0=-0.25),
                   notes="clya with the tabulated wall charge -0.25")


_BUILDERS = {"general": _general, "cylinder": _cylinder, "trumpet": _trumpet, "clya": _clya,
             "clya-table": _clya_table}
PRESET_NAMES = tuple(_BUILDERS)


def load_preset(name: str, groups: str = "derived") -> CaseSpec:
    """Built-in case by name.

    ``groups='derived'`` computes Lambda, gamma, Pe and delta from the
    reference scales; ``groups='table'`` uses the rounded tabulated values.
    """
    try:
        case = _BUILDERS[name]()
    except KeyError:
        raise PresetNotFoundError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}") from None
    if groups == "table":
        case = replace(case, groups=table_groups(case.groups.delta))
    elif groups != "derived":
        raise InvalidInputError("groups must be 'derived' or 'table'")
    return case


# ---- INI serialisation ---------------------------------------------------

_GROUP_KEYS = {"lambda": "Lambda", "gamma": "gamma", "pe": "Pe", "delta": "delta"}


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def case_to_ini(case: CaseSpec) -> str:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp["case"] = {"name": case.name, "notes": case.notes}
    cp["scales"] = {k: _fmt(v) for k, v in asdict(case.scales).items() if v is not None}
    cp["groups"] = {key: _fmt(getattr(case.groups, attr)) for key, attr in _GROUP_KEYS.items()}
    cp["mixture"] = {k: _fmt(v) for k, v in asdict(case.mixture).items()}
    cp["boundary"] = {k: _fmt(v) for k, v in asdict(case.bc).items()}
    cp["geometry"] = {k: _fmt(v) for k, v in asdict(case.geometry).items()}
    cp["solver"] = {k: _fmt(v) for k, v in asdict(case.solver).items()}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def _coerce(cls, section: configparser.SectionProxy, base):
    values = {}
    for f in fields(cls):
        if f.name not in section:
            continue
        raw = section[f.name].strip()
        current = getattr(base, f.name)
        if isinstance(current, tuple):
            values[f.name] = tuple(float(x) for x in raw.split(","))
        elif isinstance(current, bool):
            values[f.name] = section.getboolean(f.name)
        elif isinstance(current, int):
            values[f.name] = int(raw)
        elif isinstance(current, float) or current is None:
            values[f.name] = float(raw)
        else:
            values[f.name] = raw
    unknown = set(section) - {f.name for f in fields(cls)}
    if unknown:
        raise InvalidInputError(f"unknown keys in [{section.name}]: {sorted(unknown)}")
    return replace(base, **values)


def case_from_ini(text: str, base: CaseSpec | None = None) -> CaseSpec:
    """Parse INI text. Keys present override ``base`` (default: the general preset).

    A ``preset`` key in ``[case]`` selects the base preset. Scales given
    without a ``[groups]`` section are turned into groups by derivation.
    """
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    cp.read_string(text)
    case_sec = cp["case"] if cp.has_section("case") else {}
    if base is None:
        base = load_preset(case_sec.get("preset", "general"))
    scales = _coerce(ReferenceScales, cp["scales"], base.scales) if cp.has_section("scales") else base.scales
    if cp.has_section("groups"):
        sec = cp["groups"]
        unknown = set(sec) - set(_GROUP_KEYS)
        if unknown:
            raise InvalidInputError(f"unknown keys in [groups]: {sorted(unknown)}")
        groups = replace(base.groups, **{_GROUP_KEYS[k]: float(v) for k, v in sec.items()})
    elif cp.has_section("scales"):
        groups = derive_groups(scales)
    else:
        groups = base.groups
    sections = {"mixture": (MixtureSpec, base.mixture), "boundary": (BoundaryConditions, base.bc),
                "geometry": (GeometrySpec, base.geometry), "solver": (SolverConfig, base.solver)}
    built = {name: (_coerce(cls, cp[name], obj) if cp.has_section(name) else obj)
             for name, (cls, obj) in sections.items()}
    return replace(base, name=case_sec.get("name", base.name), notes=case_sec.get("notes", base.notes),
                   scales=scales, groups=groups, mixture=built["mixture"], bc=built["boundary"],
                   geometry=built["geometry"], solver=built["solver"])


def read_case(path) -> CaseSpec:
    return case_from_ini(Path(path).read_text())
