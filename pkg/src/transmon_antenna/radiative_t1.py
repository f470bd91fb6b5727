"""Radiation-limited T1 of planar transmons from their wire-dual loss.

At the qubit frequency the structure is electrically small.  The qubit
sees the aperture admittance ``Y_a = 4 Z_w / eta0**2``, so
``T1 = C / Re[Y_a] = eta0**2 C / (4 Re[Z_w])``.  For a circular island the
dual is a small loop whose radiation resistance is known in closed form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .em import C0, ETA0, Medium
from .geometry import circular_loop
from .mom import SolverConfig, input_impedance

log = logging.getLogger(__name__)

GAP_CORRECTION = 2.1
MAX_GAP_RATIO = 0.2
MAX_SMALL_KR = 0.3
# Facet count of the loop used for the MoM route.
MOM_FACETS = 64


class UnsupportedVariant(ValueError):
    pass


@dataclass(frozen=True)
class T1Config:
    """Qubit parameters for the radiative T1 estimate.

    Give either ``r_i`` (circular island, optionally with ``gap_w``) or the
    island ``area``.
    """

    C_qubit: float
    f01: float
    eps_eff: float = 1.0
    r_i: float | None = None
    gap_w: float | None = None
    area: float | None = None

    def __post_init__(self):
        if not (self.C_qubit > 0 and self.f01 > 0):
            raise ValueError("C_qubit and f01 must be positive")
        if self.eps_eff < 1:
            raise ValueError("eps_eff must be >= 1")
        if (self.r_i is None) == (self.area is None):
            raise ValueError("give exactly one of r_i or area")
        for name in ("r_i", "gap_w", "area"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if self.gap_w is not None:
            if self.r_i is None:
                raise ValueError("gap_w needs a circular island radius")
            if self.gap_w / self.r_i > MAX_GAP_RATIO:
                log.warning("gap correction used at w/r_i = %.3g, beyond its fitted range",
                            self.gap_w / self.r_i)

    @property
    def r_eff(self) -> float:
        if self.r_i is not None:
            return self.r_i
        return math.sqrt(self.area / math.pi)


def t1_from_wire_impedance(C_qubit: float, z_w: complex, eta_m: float = ETA0) -> float:
    r = complex(z_w).real
    if not r > 0:
        raise ValueError(f"Re[Z_w] = {r:.3g} ohm leaves no resolvable radiative loss")
    return eta_m**2 * C_qubit / (4 * r)


def small_loop_radiation_resistance(r: float, f: float, eps_eff: float = 1.0) -> float:
    """Uniform-current loop of radius ``r`` in a medium of permeability eps_eff.

    ``lambda`` is the in-medium wavelength.
    """
    n = math.sqrt(eps_eff)
    lam = C0 / (f * n)
    kr = 2 * math.pi * r / lam
    if kr >= MAX_SMALL_KR:
        log.warning("small-loop formula used at kr = %.3g", kr)
    return (8 / 3) * math.pi**5 * n * ETA0 * (r / lam) ** 4


def gap_factor(gap_w: float | None, r_i: float) -> float:
    return 1.0 if gap_w is None else 1.0 + GAP_CORRECTION * gap_w / r_i


def t1_analytic_loop(cfg: T1Config) -> float:
    """Closed-form radiative T1, including the finite-gap factor if given."""
    if cfg.r_i is None:
        raise ValueError("circular island required; use t1_arbitrary_island")
    omega = 2 * math.pi * cfg.f01
    t1 = (3 / (2 * math.pi)) * cfg.eps_eff**-2.5 * ETA0 * cfg.C_qubit * (C0 / (omega * cfg.r_i)) ** 4
    return t1 / gap_factor(cfg.gap_w, cfg.r_i)


def t1_arbitrary_island(cfg: T1Config) -> float:
    """Equal-area circle estimate for an island of area ``cfg.area``."""
    if cfg.area is None:
        raise ValueError("island area required")
    circ = T1Config(cfg.C_qubit, cfg.f01, cfg.eps_eff, r_i=cfg.r_eff)
    return t1_analytic_loop(circ)


def mom_loop_impedance(cfg: T1Config, solver: SolverConfig = SolverConfig()) -> complex:
    """Gap-fed wire-dual loop impedance at f01.

    The loop runs along the gap centre line with radius ``r_i + w/2`` and
    wire radius ``w/4``.
    """
    if cfg.r_i is None or cfg.gap_w is None:
        raise ValueError("MoM route needs r_i and gap_w")
    medium = Medium(mu_rel=cfg.eps_eff)
    loop = circular_loop(cfg.r_i + cfg.gap_w / 2, cfg.gap_w / 4, MOM_FACETS, medium)
    return input_impedance(loop, cfg.f01, solver)


def t1_mom(cfg: T1Config, solver: SolverConfig = SolverConfig()) -> tuple[float, complex]:
    z_w = mom_loop_impedance(cfg, solver)
    return t1_from_wire_impedance(cfg.C_qubit, z_w), z_w


def t1_differential(*_args, **_kw):
    raise UnsupportedVariant(
        "radiative T1 of differential qubits is set by their residual magnetic "
        "dipole moment; no closed form is available for it"
    )


def t1_report(cfg: T1Config, method: str = "analytic",
              solver: SolverConfig = SolverConfig()) -> dict:
    if method == "analytic":
        t1 = t1_arbitrary_island(cfg) if cfg.r_i is None else t1_analytic_loop(cfg)
        re_zw = (small_loop_radiation_resistance(cfg.r_eff, cfg.f01, cfg.eps_eff)
                 * gap_factor(cfg.gap_w, cfg.r_eff))
    elif method == "mom":
        t1, z_w = t1_mom(cfg, solver)
        re_zw = z_w.real
    else:
        raise ValueError("method must be 'analytic' or 'mom'")
    return {"T1_s": t1, "re_Zw_ohm": re_zw, "r_eff_um": cfg.r_eff * 1e6,
            "eps_eff": cfg.eps_eff, "method": method}
