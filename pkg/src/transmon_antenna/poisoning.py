"""Blackbody pair-breaking photon absorption at the junction."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .em import CONST, blackbody_psd, bose_occupation
from .matching import MatchReport

MODES = ("exact", "approx")


@dataclass(frozen=True)
class PoisoningReport:
    f0: float
    delta_f_N: float
    T: float
    power_exact: float
    power_approx: float
    gamma_pa: float

    def __post_init__(self):
        for name in ("f0", "delta_f_N", "T", "power_exact", "power_approx", "gamma_pa"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def to_dict(self) -> dict:
        return {
            "f0_GHz": self.f0 / 1e9,
            "delta_f_N_GHz": self.delta_f_N / 1e9,
            "T_mK": self.T * 1e3,
            "gamma_pa_Hz": self.gamma_pa,
            "power_W": self.power_approx,
            "power_exact_W": self.power_exact,
        }


def absorbed_power(match: MatchReport, T: float, mode: str = "exact") -> float:
    """Blackbody power delivered to the junction, in W.

    ``exact`` integrates S(f, T) e_c(f) over the fundamental lobe; ``approx``
    is S(f0, T) times the noise bandwidth.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    if mode == "approx":
        return float(blackbody_psd(match.f0, T) * match.delta_f_N)
    if mode != "exact":
        raise ValueError(f"mode must be one of {MODES}")
    lobe = match.lobe
    f = match.grid.frequencies[lobe]
    if len(f) < 2:
        return 0.0
    return float(np.trapezoid(blackbody_psd(f, T) * match.e_c[lobe], f))


def poisoning_rate(f0: float, delta_f_N: float, T: float) -> float:
    """Photon-assisted poisoning rate, one event per absorbed photon."""
    if not f0 > 0:
        raise ValueError("f0 must be positive")
    if delta_f_N < 0:
        raise ValueError("noise bandwidth must be non-negative")
    return float(delta_f_N * bose_occupation(f0, T))


def effective_temperature(f0: float, delta_f_N: float, gamma_observed: float) -> float:
    """Blackbody temperature that produces ``gamma_observed`` poisoning events/s."""
    if not (f0 > 0 and delta_f_N > 0 and gamma_observed > 0):
        raise ValueError("f0, delta_f_N and gamma_observed must be positive")
    return CONST.h * f0 / (CONST.kB * math.log1p(delta_f_N / gamma_observed))


def poisoning_report(match: MatchReport, T: float) -> PoisoningReport:
    return PoisoningReport(
        f0=match.f0,
        delta_f_N=match.delta_f_N,
        T=T,
        power_exact=absorbed_power(match, T, "exact"),
        power_approx=absorbed_power(match, T, "approx"),
        gamma_pa=poisoning_rate(match.f0, match.delta_f_N, T),
    )


def rate_report(f0: float, delta_f_N: float, T: float) -> PoisoningReport:
    """Report for a bare (f0, delta_f_N) pair without an efficiency curve."""
    p = float(blackbody_psd(f0, T) * delta_f_N)
    return PoisoningReport(f0, delta_f_N, T, p, p, poisoning_rate(f0, delta_f_N, T))
