"""Above-gap electrical model of a Josephson junction.

Above the gap frequency the junction is its tunnel resistance ``R_n`` in
parallel with its self-capacitance ``C_j``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .em import CONST

ALUMINUM_GAP_VOLTAGE = 380e-6  # 2*Delta/e in volts
DEFAULT_SPECIFIC_CAPACITANCE = 75e-15  # F per um^2


@dataclass(frozen=True)
class JunctionModel:
    R_n: float
    C_j: float
    gap_voltage_2delta: float = ALUMINUM_GAP_VOLTAGE
    junction_area: float | None = None  # um^2, informational
    specific_capacitance: float | None = None  # F/um^2, informational

    def __post_init__(self):
        if not (self.R_n > 0 and self.C_j > 0):
            raise ValueError(f"R_n and C_j must be positive, got {self.R_n}, {self.C_j}")
        if not self.gap_voltage_2delta > 0:
            raise ValueError("gap voltage must be positive")

    @classmethod
    def from_area(cls, R_n: float, area: float,
                  specific_c: float = DEFAULT_SPECIFIC_CAPACITANCE, **kw) -> JunctionModel:
        return cls(R_n=R_n, C_j=capacitance_from_area(area, specific_c),
                   junction_area=area, specific_capacitance=specific_c, **kw)

    @property
    def tau(self) -> float:
        return self.R_n * self.C_j

    @property
    def delta(self) -> float:
        """Superconducting gap in joules."""
        return CONST.e_charge * self.gap_voltage_2delta / 2


def junction_impedance(j: JunctionModel, f):
    """``R_n (1 - j w tau) / (1 + (w tau)^2)``; accepts scalar or array f."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("frequency must be non-negative")
    wt = 2 * math.pi * f * j.tau
    z = np.asarray(j.R_n * (1 - 1j * wt) / (1 + wt * wt))
    return complex(z) if z.ndim == 0 else z


def critical_current(j: JunctionModel) -> float:
    """Ambegaokar-Baratoff critical current, pi Delta / (2 e R_n)."""
    return math.pi * j.delta / (2 * CONST.e_charge * j.R_n)


def capacitance_from_area(area: float, specific_c: float = DEFAULT_SPECIFIC_CAPACITANCE) -> float:
    if not area > 0:
        raise ValueError("junction area must be positive")
    if not specific_c > 0:
        raise ValueError("specific capacitance must be positive")
    return area * specific_c


def junction_from_dict(doc: dict) -> JunctionModel:
    allowed = {"R_n_ohm", "C_j_fF", "area_um2", "specific_c_fF_um2", "gap_voltage_uV"}
    unknown = set(doc) - allowed
    if unknown:
        raise ValueError(f"unknown junction keys: {sorted(unknown)}")
    if "R_n_ohm" not in doc:
        raise ValueError("junction needs R_n_ohm")
    kw = {}
    if "gap_voltage_uV" in doc:
        kw["gap_voltage_2delta"] = float(doc["gap_voltage_uV"]) * 1e-6
    R_n = float(doc["R_n_ohm"])
    if "C_j_fF" in doc:
        if "area_um2" in doc:
            raise ValueError("give either C_j_fF or area_um2, not both")
        return JunctionModel(R_n=R_n, C_j=float(doc["C_j_fF"]) * 1e-15, **kw)
    if "area_um2" in doc:
        c_spec = float(doc.get("specific_c_fF_um2", DEFAULT_SPECIFIC_CAPACITANCE * 1e15)) * 1e-15
        return JunctionModel.from_area(R_n, float(doc["area_um2"]), c_spec, **kw)
    raise ValueError("junction needs C_j_fF or area_um2")


def load_junction(path: str | Path) -> JunctionModel:
    with open(path) as fh:
        return junction_from_dict(json.load(fh))
