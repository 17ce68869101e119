"""Electrolyte composition for the three chemical-potential variants.

``classical``  point ions, a = 0, total density pinned to 1.
``bikerman``   equal lattice sites, a = 1 and v = v0, so n_bar = 1/v0.
``mixture``    incompressible mixture with solvation, a = v/v0.

Arrays of per-species quantities carry the species index first.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidInputError, StateError

VARIANTS = ("classical", "bikerman", "mixture")
Y0_FLOOR = 1e-14


@dataclass(frozen=True)
class Species:
    name: str
    z: float
    k: float
    a: float = 0.0
    v: float = 0.0

    def __post_init__(self):
        if not self.k > 0:
            raise InvalidInputError(f"species {self.name}: mobility must be positive")
        if self.a < 0 or self.v < 0:
            raise InvalidInputError(f"species {self.name}: a and v must be non-negative")


@dataclass(frozen=True, eq=False)
class Mixture:
    species: tuple[Species, ...]
    v0: float = 0.018
    variant: str = "classical"

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        if not self.species:
            raise InvalidInputError("mixture needs at least one species")
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        a, v = self.a, self.v
        if self.variant == "classical":
            if np.any(a != 0):
                raise InvalidInputError("classical variant requires a = 0 for every species")
            return
        if not self.v0 > 0:
            raise InvalidInputError("solvent molar volume must be positive")
        if self.variant == "bikerman":
            if np.any(a != 1) or not np.allclose(v, self.v0, rtol=1e-12):
                raise InvalidInputError("bikerman variant requires a = 1 and v = v0")
        # table values are rounded (e.g. a = 4.15 for v/v0 = 4.17), so allow 1 %
        elif np.any(a <= 0) or not np.allclose(a, v / self.v0, rtol=1e-2):
            raise InvalidInputError("mixture variant requires a = v/v0 > 0")

    @cached_property
    def z(self) -> np.ndarray:
        return np.array([s.z for s in self.species], dtype=float)

    @cached_property
    def k(self) -> np.ndarray:
        return np.array([s.k for s in self.species], dtype=float)

    @cached_property
    def a(self) -> np.ndarray:
        return np.array([s.a for s in self.species], dtype=float)

    @cached_property
    def v(self) -> np.ndarray:
        return np.array([s.v for s in self.species], dtype=float)

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def classical(self) -> bool:
        return self.variant == "classical"

    @classmethod
    def binary(cls, k_plus: float, k_minus: float, variant: str = "classical",
               a: float | None = None, v0: float = 0.018, v: float | None = None) -> "Mixture":
        """Monovalent salt. ``a`` selects the variant when ``variant`` is 'auto'."""
        if variant == "auto":
            variant = "classical" if not a else ("bikerman" if a == 1 else "mixture")
        if variant == "classical":
            a, v = 0.0, 0.0
        elif variant == "bikerman":
            a, v = 1.0, v0
        else:
            if a is None and v is None:
                raise InvalidInputError("mixture variant needs a or v")
            if v is None:
                v = a * v0
            if a is None:
                a = v / v0
        return cls(species=(Species("+", 1.0, k_plus, a, v), Species("-", -1.0, k_minus, a, v)),
                   v0=v0, variant=variant)


def _col(arr, ndim):
    return np.reshape(arr, arr.shape + (1,) * ndim)


def _boltzmann(mixture: Mixture, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    return np.exp(-_col(mixture.z, phi.ndim) * phi)


def _weights(Q, phi, mixture):
    phi = np.asarray(phi, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Q.shape[0] != mixture.n_species:
        raise InvalidInputError("Q must carry one entry per species along axis 0")
    if np.any(Q < 0):
        raise InvalidInputError("Q must be non-negative")
    Q = Q.reshape(Q.shape + (1,) * (phi.ndim - Q.ndim + 1))
    return Q * _boltzmann(mixture, phi)


def y0_from_weights(w, a, tol: float = 1e-15, max_iter: int = 100) -> np.ndarray:
    """Root of 1 - y - sum_a w_a y**a_a on [Y0_FLOOR, 1], vectorised.

    Newton in t = ln y. There g(t) = 1 - e^t - sum w e^(a t) is concave and
    decreasing, so Newton started to the right of the root approaches it
    monotonically. The start is the largest single-species root
    -ln(w_a)/a_a (capped at 0), where g <= 0 holds. Nodes that have not
    settled after ``max_iter`` steps are finished by bisection.
    ``w`` has the species axis first; ``a`` is one exponent per species.
    """
    w = np.asarray(w, dtype=float)
    a = _col(np.asarray(a, dtype=float), w.ndim - 1)
    t_floor = np.log(Y0_FLOOR)
    with np.errstate(divide="ignore", invalid="ignore"):
        single = np.where((w > 0) & (a > 0), -np.log(w) / np.where(a > 0, a, 1.0), -np.inf)
    t = np.clip(np.max(single, axis=0), t_floor, 0.0)
    done = False
    for _ in range(max_iter):
        ea = np.exp(a * t)
        et = np.exp(t)
        g = 1.0 - et - np.sum(w * ea, axis=0)
        dg = -et - np.sum(a * w * ea, axis=0)
        step = g / dg
        t_new = np.clip(t - step, t_floor, 0.0)
        settled = np.abs(t_new - t) <= tol + 4.0 * np.finfo(float).eps * np.abs(t_new)
        t = t_new
        if np.all(settled):
            done = True
            break
    y = np.exp(t)
    if not done:
        y = _bisect_y0(w, a, n_iter=200)
    return y


def _bisect_y0(w, a, n_iter: int = 200) -> np.ndarray:
    lo = np.zeros(w.shape[1:])
    hi = np.ones(w.shape[1:])
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        g = 1.0 - mid - np.sum(w * mid**a, axis=0)
        lo = np.where(g > 0, mid, lo)
        hi = np.where(g > 0, hi, mid)
    return 0.5 * (lo + hi)


def solve_y0(Q, phi_r, mixture: Mixture) -> np.ndarray:
    """Solvent mole fraction for axial factors ``Q`` and radial potential ``phi_r``."""
    phi_r = np.asarray(phi_r, dtype=float)
    if mixture.classical:
        return np.ones_like(phi_r)
    return y0_from_weights(_weights(Q, phi_r, mixture), mixture.a)


def solve_y0_bisect(Q, phi_r, mixture: Mixture, n_iter: int = 200) -> np.ndarray:
    """Plain bisection for the same root; slow, used as a reference."""
    phi_r = np.asarray(phi_r, dtype=float)
    if mixture.classical:
        return np.ones_like(phi_r)
    return _bisect_y0(_weights(Q, phi_r, mixture), _col(mixture.a, phi_r.ndim), n_iter)


def total_concentration(y, mixture: Mixture) -> np.ndarray:
    """n_bar = 1 / (v0 + sum (v_a - v0) y_a); fixed to 1 for point ions."""
    y = np.asarray(y, dtype=float)
    if mixture.classical:
        return np.ones(y.shape[1:])
    dv = _col(mixture.v - mixture.v0, y.ndim - 1)
    denom = mixture.v0 + np.sum(dv * y, axis=0)
    if np.any(denom <= 0):
        raise StateError("non-positive molar-volume denominator; composition is unphysical")
    return 1.0 / denom


@dataclass(frozen=True, eq=False)
class Composition:
    """Pointwise composition on a slice (or a stack of slices).

    ``A`` is n_bar * y0**a per species and ``E`` the Boltzmann factor
    exp(-z phi_r), so that ``n = Q * A * E``.
    """

    y: np.ndarray
    y0: np.ndarray
    n_bar: np.ndarray
    n: np.ndarray
    q: np.ndarray
    A: np.ndarray
    E: np.ndarray


def slice_composition(Q, phi_r, mixture: Mixture) -> Composition:
    phi_r = np.asarray(phi_r, dtype=float)
    w = _weights(Q, phi_r, mixture)
    E = _boltzmann(mixture, phi_r)
    a = _col(mixture.a, phi_r.ndim)
    if mixture.classical:
        y0 = np.ones_like(phi_r)
        y = w
    else:
        y0 = y0_from_weights(w, mixture.a)
        y = w * y0**a
    n_bar = total_concentration(y, mixture)
    n = n_bar * y
    q = np.sum(_col(mixture.z, phi_r.ndim) * n, axis=0)
    A = n_bar * y0**a
    return Composition(y=y, y0=y0, n_bar=n_bar, n=n, q=q, A=A, E=E)


def charge_density(Q, phi_r, mixture: Mixture, with_slope: bool = False):
    """Charge density q(phi_r) and, optionally, dq/dphi_r at fixed Q."""
    comp = slice_composition(Q, phi_r, mixture)
    if not with_slope:
        return comp.q
    nd = comp.q.ndim
    z = _col(mixture.z, nd)
    if mixture.classical:
        return comp.q, -np.sum(z * z * comp.n, axis=0)
    a = _col(mixture.a, nd)
    y, y0 = comp.y, comp.y0
    dy0 = np.sum(z * y, axis=0) / (1.0 + np.sum(a * y, axis=0) / y0)
    dy = y * (-z + a * dy0 / y0)
    dv = _col(mixture.v - mixture.v0, nd)
    dn_bar = -comp.n_bar**2 * np.sum(dv * dy, axis=0)
    dq = dn_bar * np.sum(z * y, axis=0) + comp.n_bar * np.sum(z * dy, axis=0)
    return comp.q, dq


def chemical_potential(n, mixture: Mixture) -> np.ndarray:
    """Dimensionless chemical potentials with zero reference potential.

    Classical: ln n. Bikerman and mixture: ln y - a ln y0 where the solvent
    mole fraction is 1 minus the ion mole fractions (ions only, the solvent
    is not part of the crowding sum).
    """
    n = np.asarray(n, dtype=float)
    if mixture.classical:
        if np.any(n <= 0):
            raise StateError("log of non-positive concentration")
        return np.log(n)
    # solvent density from incompressibility: v0 n0 + sum v n = 1
    n0 = (1.0 - np.sum(_col(mixture.v, n.ndim - 1) * n, axis=0)) / mixture.v0
    n_bar = n0 + np.sum(n, axis=0)
    y = n / n_bar
    y0 = n0 / n_bar
    if np.any(y <= 0) or np.any(y0 <= 0):
        raise StateError("log of non-positive mole fraction")
    return np.log(y) - _col(mixture.a, n.ndim - 1) * np.log(y0)


def bulk_mole_fractions(n, mixture: Mixture):
    """Ion and solvent mole fractions and n_bar of a bulk state with densities ``n``."""
    n = np.asarray(n, dtype=float)
    if mixture.classical:
        return n, np.ones(n.shape[1:]), np.ones(n.shape[1:])
    n0 = (1.0 - np.sum(_col(mixture.v, n.ndim - 1) * n, axis=0)) / mixture.v0
    if np.any(n0 <= 0):
        raise StateError("bulk concentrations exceed the available volume")
    n_bar = n0 + np.sum(n, axis=0)
    return n / n_bar, n0 / n_bar, n_bar


def boundary_factors(n, mixture: Mixture) -> np.ndarray:
    """Axial factors Q_a = y_a / y0**a_a that reproduce bulk densities ``n``."""
    y, y0, _ = bulk_mole_fractions(n, mixture)
    return y / y0 ** _col(mixture.a, np.ndim(y0))
