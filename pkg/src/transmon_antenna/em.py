"""Shared electromagnetic bookkeeping: constants, media, frequency grids and
impedance sweeps.

Frequencies are carried in Hz throughout; angular frequency is formed where
it is needed.  Complex impedances follow the exp(+jwt) convention, so an
inductive reactance is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
import numpy as np
import scipy.constants as const


@dataclass(frozen=True)
class Constants:
    """CODATA values used by every module (SI units)."""

    c0: float = const.c
    mu0: float = const.mu_0
    eps0: float = const.epsilon_0
    h: float = const.h
    kB: float = const.k
    e_charge: float = const.e

    @property
    def eta0(self) -> float:
        return math.sqrt(self.mu0 / self.eps0)


CONST = Constants()
ETA0 = CONST.eta0
C0 = CONST.c0


@dataclass(frozen=True)
class Medium:
    """Homogeneous, lossless medium described by relative constants."""

    eps_rel: float = 1.0
    mu_rel: float = 1.0

    def __post_init__(self):
        if not (self.eps_rel >= 1.0 and self.mu_rel >= 1.0):
            raise ValueError(
                f"relative constants must be >= 1, got eps_rel={self.eps_rel}, "
                f"mu_rel={self.mu_rel}"
            )

    @property
    def eta(self) -> float:
        """Wave impedance of the medium in ohm."""
        return ETA0 * math.sqrt(self.mu_rel / self.eps_rel)

    @property
    def index(self) -> float:
        return math.sqrt(self.mu_rel * self.eps_rel)

    def wavenumber(self, f: float) -> float:
        return 2.0 * math.pi * f * self.index / C0

    def wavelength(self, f: float) -> float:
        return C0 / (self.index * f)


VACUUM = Medium()


@dataclass(frozen=True)
class FrequencyGrid:
    """Linear frequency grid, inclusive of both ends."""

    f_start: float
    f_stop: float
    n_points: int

    def __post_init__(self):
        if not self.f_start > 0:
            raise ValueError(f"f_start must be positive, got {self.f_start}")
        if self.n_points < 1:
            raise ValueError(f"n_points must be >= 1, got {self.n_points}")
        if self.n_points == 1:
            if self.f_stop != self.f_start:
                raise ValueError("a single-point grid needs f_stop == f_start")
        elif not self.f_stop > self.f_start:
            raise ValueError(
                f"grid must be strictly increasing ({self.f_start} .. {self.f_stop})"
            )

    @classmethod
    def single(cls, f: float) -> FrequencyGrid:
        return cls(f, f, 1)

    @property
    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, self.n_points)

    @property
    def spacing(self) -> float:
        if self.n_points == 1:
            return 0.0
        return (self.f_stop - self.f_start) / (self.n_points - 1)


# Re[Z] may dip this far below zero before a sweep is considered unphysical.
PASSIVITY_TOL = 0.01


@dataclass(frozen=True)
class ImpedanceSweep:
    """Complex impedance sampled on a frequency grid.

    ``space_tag`` records whether the values belong to the wire-space model
    or to the aperture (qubit) structure.
    """

    grid: FrequencyGrid
    z: np.ndarray = field(repr=False)
    space_tag: str = "wire"

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        if z.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} impedance values, got shape {z.shape}"
            )
        if not np.all(np.isfinite(z)):
            raise ValueError("impedance sweep contains NaN or Inf")
        if self.space_tag not in ("wire", "aperture"):
            raise ValueError(f"unknown space tag {self.space_tag!r}")
        if np.any(z.real < -PASSIVITY_TOL):
            worst = int(np.argmin(z.real))
            raise ValueError(
                f"Re[Z] = {z.real[worst]:.4g} ohm at "
                f"{self.grid.frequencies[worst] / 1e9:.4g} GHz violates passivity"
            )
        z.setflags(write=False)
        object.__setattr__(self, "z", z)

    @property
    def frequencies(self) -> np.ndarray:
        return self.grid.frequencies

    def __len__(self) -> int:
        return self.grid.n_points


def effective_permittivity(eps_substrate: float) -> float:
    """Permittivity seen by a planar structure on a semi-infinite substrate."""
    if eps_substrate < 1:
        raise ValueError(f"substrate permittivity must be >= 1, got {eps_substrate}")
    return (1.0 + eps_substrate) / 2.0


def blackbody_psd(f, T):
    """Single-mode, single-polarization blackbody power spectral density.

    Returns ``h f / (exp(h f / kB T) - 1)`` in W/Hz.  Works elementwise on
    arrays.  ``T == 0`` and arguments with ``h f / kB T > 700`` give 0.
    """
    f = np.asarray(f, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    if np.any(T < 0):
        raise ValueError("temperature must be non-negative")
    hf = CONST.h * f
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(T > 0, hf / (CONST.kB * np.where(T > 0, T, 1.0)), np.inf)
    safe = x <= 700.0
    out = np.where(safe, hf / np.expm1(np.where(safe, x, 1.0)), 0.0)
    return out[()] if out.ndim == 0 else out


def bose_occupation(f, T):
    """Mean photon number 1/(exp(hf/kBT) - 1), overflow-guarded like
    :func:`blackbody_psd`."""
    return blackbody_psd(f, T) / (CONST.h * np.asarray(f, dtype=float))

