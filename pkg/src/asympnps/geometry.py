"""Axisymmetric pore shapes R(z), wall charge sigma(z) and axial quadratures."""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from .errors import InvalidInputError, ProfileFormatError


@dataclass(frozen=True, eq=False)
class PoreGeometry:
    """Sampled pore shape on a strictly increasing axial grid ``z`` on [0, L].

    All arrays share the length of ``z``. ``sigma`` defaults to an uncharged
    wall; use :func:`tanh_surface_charge` to add a charge pattern.
    """

    z: np.ndarray
    R: np.ndarray
    dRdz: np.ndarray
    sigma: np.ndarray
    kind: str = "profile"

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float)
        arrays = {name: np.asarray(getattr(self, name), dtype=float)
                  for name in ("R", "dRdz", "sigma")}
        if z.ndim != 1 or z.size < 2 or np.any(np.diff(z) <= 0):
            raise InvalidInputError("z nodes must be strictly increasing")
        if z[0] != 0.0:
            raise InvalidInputError("z nodes must start at 0")
        for name, arr in arrays.items():
            if arr.shape != z.shape:
                raise InvalidInputError(f"{name} must be sampled on the z grid")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if np.any(arrays["R"] <= 0):
            raise InvalidInputError("radius must be positive everywhere")
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def L(self) -> float:
        return float(self.z[-1])

    @property
    def n_z(self) -> int:
        return self.z.size

    @property
    def is_cylinder(self) -> bool:
        return bool(np.all(self.R == self.R[0]))

    @cached_property
    def I_phiz(self) -> np.ndarray:
        """Cumulative integral of R^-2 from 0 to z (trapezoid rule)."""
        return cumulative_trapezoid(self.R**-2, self.z, initial=0.0)

    @cached_property
    def I_p(self) -> np.ndarray:
        """Cumulative integral of R^-4 from 0 to z (trapezoid rule)."""
        return cumulative_trapezoid(self.R**-4, self.z, initial=0.0)

    @property
    def dI_phiz(self) -> np.ndarray:
        return self.I_phiz / self.I_phiz[-1]

    @property
    def dI_p(self) -> np.ndarray:
        return self.I_p / self.I_p[-1]

    def with_sigma(self, sigma) -> "PoreGeometry":
        return replace(self, sigma=np.broadcast_to(np.asarray(sigma, dtype=float), self.z.shape).copy())


def _axial_grid(L: float, n_z: int) -> np.ndarray:
    if not L > 0:
        raise InvalidInputError("pore length must be positive")
    if n_z < 2:
        raise InvalidInputError("need at least two axial nodes")
    return np.linspace(0.0, L, n_z)


def make_cylinder(R: float, L: float, n_z: int = 200) -> PoreGeometry:
    if not R > 0:
        raise InvalidInputError("radius must be positive")
    z = _axial_grid(L, n_z)
    return PoreGeometry(z=z, R=np.full_like(z, R), dRdz=np.zeros_like(z),
                        sigma=np.zeros_like(z), kind="cylinder")


def trumpet_radius(z, R1: float, R2: float, L: float):
    """Parabolic trumpet: R(0) = R(L) = R1, R(L/2) = R2."""
    z = np.asarray(z, dtype=float)
    return 4.0 * (R1 - R2) / L**2 * (z**2 - z * L) + R1


def make_trumpet(R1: float, R2: float, L: float, n_z: int = 200) -> PoreGeometry:
    if not R1 >= R2 > 0:
        raise InvalidInputError("trumpet needs R1 >= R2 > 0")
    z = _axial_grid(L, n_z)
    R = trumpet_radius(z, R1, R2, L)
    dRdz = 4.0 * (R1 - R2) / L**2 * (2.0 * z - L)
    kind = "cylinder" if R1 == R2 else "trumpet"
    return PoreGeometry(z=z, R=R, dRdz=dRdz, sigma=np.zeros_like(z), kind=kind)


def read_profile(path) -> np.ndarray:
    """Read a whitespace-separated ``z R`` table, skipping '#' comments."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise ProfileFormatError(f"{path}:{lineno}: expected two columns, got {len(parts)}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ProfileFormatError(f"{path}:{lineno}: {exc}") from None
    return np.array(rows, dtype=float).reshape(-1, 2)


def _check_table(table) -> tuple[np.ndarray, np.ndarray]:
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[1] != 2:
        raise ProfileFormatError("profile must be a two-column (z, R) table")
    if table.shape[0] < 4:
        raise ProfileFormatError("profile needs at least 4 records")
    zt, Rt = table[:, 0], table[:, 1]
    if not np.all(np.isfinite(table)):
        raise ProfileFormatError("profile contains non-finite values")
    if np.any(np.diff(zt) <= 0):
        raise ProfileFormatError("profile z column must be strictly increasing")
    if np.any(Rt <= 0):
        raise ProfileFormatError("profile radii must be positive")
    return zt, Rt


def load_profile(table, n_z: int = 200) -> PoreGeometry:
    """Interpolate a tabulated profile onto a uniform grid.

    The table abscissae are shifted so the pore starts at z = 0. PCHIP keeps
    the interpolant inside the range of neighbouring data, so R never dips
    below the smallest tabulated radius.
    """
    zt, Rt = _check_table(table)
    interp = PchipInterpolator(zt - zt[0], Rt)
    z = _axial_grid(zt[-1] - zt[0], n_z)
    return PoreGeometry(z=z, R=interp(z), dRdz=interp.derivative()(z),
                        sigma=np.zeros_like(z), kind="profile")


def make_flared_profile(table, L: float, R_reservoir: float, n_z: int = 200) -> PoreGeometry:
    """Embed a tabulated pore between two linearly narrowing reservoirs.

    The table carries absolute z positions inside (0, L). The reservoirs run
    linearly from ``R_reservoir`` at z = 0 and z = L to the first and last
    tabulated radius. Both junctions are grid nodes; the derivative there is
    the mean of the one-sided slopes.
    """
    zt, Rt = _check_table(table)
    z_a, z_b = zt[0], zt[-1]
    if not 0 < z_a < z_b < L:
        raise ProfileFormatError("tabulated pore must lie strictly inside (0, L)")
    # node counts proportional to segment length, at least 4 per segment
    lengths = np.array([z_a, z_b - z_a, L - z_b])
    counts = np.maximum(4, np.round(lengths / L * (n_z - 1)).astype(int))
    counts[1] += (n_z - 1) - counts.sum()
    z = np.concatenate([
        np.linspace(0.0, z_a, counts[0] + 1)[:-1],
        np.linspace(z_a, z_b, counts[1] + 1)[:-1],
        np.linspace(z_b, L, counts[2] + 1),
    ])
    interp = PchipInterpolator(zt, Rt)
    dinterp = interp.derivative()
    slope_a = (Rt[0] - R_reservoir) / z_a
    slope_b = (R_reservoir - Rt[-1]) / (L - z_b)
    R = np.where(z < z_a, R_reservoir + slope_a * z,
                 np.where(z > z_b, Rt[-1] + slope_b * (z - z_b), interp(np.clip(z, z_a, z_b))))
    dRdz = np.where(z < z_a, slope_a, np.where(z > z_b, slope_b, dinterp(np.clip(z, z_a, z_b))))
    ia, ib = np.searchsorted(z, z_a), np.searchsorted(z, z_b)
    dRdz[ia] = 0.5 * (slope_a + dinterp(z_a))
    dRdz[ib] = 0.5 * (slope_b + dinterp(z_b))
    return PoreGeometry(z=z, R=R, dRdz=dRdz, sigma=np.zeros_like(z), kind="profile")


def clya_profile_table() -> np.ndarray:
    """Bundled ClyA lumen profile (z in [2, 3.5], radius in units of R0)."""
    ref = resources.files("asympnps") / "data" / "clya_profile.txt"
    with resources.as_file(ref) as path:
        return read_profile(path)


def tanh_charge(z, sigma0: float, L1: float, L2: float, eps: float):
    z = np.asarray(z, dtype=float)
    return 0.5 * sigma0 * (np.tanh((z - L1) / eps) - np.tanh((z - L2) / eps))


def tanh_surface_charge(geometry: PoreGeometry, sigma0: float, L1: float, L2: float,
                        eps: float) -> PoreGeometry:
    """Smoothed top-hat wall charge switched on between L1 and L2."""
    if not eps > 0:
        raise InvalidInputError("eps must be positive")
    if not 0 <= L1 < L2 <= geometry.L:
        raise InvalidInputError("need 0 <= L1 < L2 <= L")
    return geometry.with_sigma(tanh_charge(geometry.z, sigma0, L1, L2, eps))
