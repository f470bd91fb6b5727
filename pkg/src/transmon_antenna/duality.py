"""Babinet mapping between a wire antenna and its complementary aperture.

``Z_a * Z_w = eta**2 / 4``.  When the aperture sits in a dielectric
(``eps_rel = eps_eff``) and the wire dual in the swapped magnetic medium
(``mu_rel = eps_eff``), the product of the two media impedances is still
``eta0**2``, so the vacuum impedance is the right ``eta`` for the map.  It
is the default here; any other value can be passed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .em import CONST, ETA0, ImpedanceSweep, Medium


@dataclass(frozen=True)
class DualityMap:
    eta_m: float = ETA0

    def __post_init__(self):
        if not self.eta_m > 0:
            raise ValueError("eta_m must be positive")

    @property
    def product(self) -> float:
        """The constant Z_a * Z_w."""
        return self.eta_m**2 / 4

    def wire_to_aperture(self, z_w):
        return wire_to_aperture(z_w, self.eta_m)

    aperture_to_wire = wire_to_aperture


def duality_eta(wire_medium: Medium, aperture_medium: Medium | None = None) -> float:
    """Geometric mean of the two media impedances (``eta0`` for swapped media)."""
    if aperture_medium is None:
        aperture_medium = map_medium(wire_medium)
    return float(np.sqrt(wire_medium.eta * aperture_medium.eta))


def wire_to_aperture(z_w, eta_m: float = ETA0):
    """Impedance of the complementary structure, ``eta_m**2 / (4 z_w)``.

    The map is its own inverse, so the same call takes aperture impedances
    back to wire space.
    """
    z = np.asarray(z_w, dtype=complex)
    if np.any(z == 0):
        raise ZeroDivisionError("zero impedance is a pole of the Babinet map")
    out = eta_m**2 / (4 * z)
    return complex(out) if out.ndim == 0 else out


aperture_to_wire = wire_to_aperture


def sweep_to_aperture(sweep: ImpedanceSweep, eta_m: float = ETA0) -> ImpedanceSweep:
    if sweep.space_tag != "wire":
        raise ValueError("expected a wire-space sweep")
    return ImpedanceSweep(sweep.grid, wire_to_aperture(sweep.z, eta_m), "aperture")


def map_medium(medium: Medium) -> Medium:
    """Swap permittivity and permeability between the dual spaces."""
    return Medium(eps_rel=medium.mu_rel, mu_rel=medium.eps_rel)


def loop_inductance_to_capacitance(L_w: float) -> float:
    """Capacitance of the electrode complementary to a loop of inductance L_w."""
    if not L_w > 0:
        raise ValueError("inductance must be positive")
    return 4 * (CONST.eps0 / CONST.mu0) * L_w
