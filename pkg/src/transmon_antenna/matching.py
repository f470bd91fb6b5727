"""Conjugate-match analysis between a radiating structure and the junction."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .em import FrequencyGrid, ImpedanceSweep
from .junction import JunctionModel, junction_impedance

log = logging.getLogger(__name__)

LOBE_THRESHOLD = 0.01


def reflection(z_rad, z_j):
    """Power-wave reflection coefficient ``(Z_rad - Z_j*) / (Z_rad + Z_j)``."""
    z_rad = np.asarray(z_rad, dtype=complex)
    z_j = np.asarray(z_j, dtype=complex)
    den = z_rad + z_j
    if np.any(den == 0):
        raise ZeroDivisionError("Z_rad + Z_j vanishes; reflection undefined")
    g = (z_rad - np.conj(z_j)) / den
    return complex(g) if g.ndim == 0 else g


def coupling_efficiency(z_rad, z_j):
    """``1 - |Gamma|^2``, clipped into [0, 1]; clipping is logged."""
    g = np.abs(np.asarray(reflection(z_rad, z_j)))
    e = 1.0 - g * g
    clipped = np.clip(e, 0.0, 1.0)
    if np.any(clipped != e):
        worst = float(np.max(np.abs(clipped - e)))
        log.warning("clipped %d coupling efficiencies into [0, 1] (max excursion %.3g)",
                    int(np.sum(clipped != e)), worst)
    return float(clipped) if clipped.ndim == 0 else clipped


def fundamental_lobe(e_c, threshold: float = LOBE_THRESHOLD) -> slice:
    """Contiguous index range around the global maximum with e_c >= threshold*max."""
    e_c = np.asarray(e_c, dtype=float)
    peak = int(np.argmax(e_c))
    cut = threshold * e_c[peak]
    lo = peak
    while lo > 0 and e_c[lo - 1] >= cut:
        lo -= 1
    hi = peak
    while hi < len(e_c) - 1 and e_c[hi + 1] >= cut:
        hi += 1
    return slice(lo, hi + 1)


def noise_bandwidth(e_c_curve, grid: FrequencyGrid) -> float:
    """Trapezoidal integral of e_c over the fundamental lobe, in Hz."""
    e = np.asarray(e_c_curve, dtype=float)
    if e.shape != (grid.n_points,):
        raise ValueError("efficiency curve does not match the grid")
    if not np.any(e > 0):
        log.warning("coupling efficiency is zero everywhere; noise bandwidth is 0")
        return 0.0
    lobe = fundamental_lobe(e)
    f = grid.frequencies[lobe]
    if len(f) < 2:
        return 0.0
    return float(np.trapezoid(e[lobe], f))


def refine_peak(f: np.ndarray, y: np.ndarray) -> float:
    """Vertex of the parabola through the maximum and its neighbours.

    The result is clamped to the interval bracketing the maximum.
    """
    k = int(np.argmax(y))
    if k == 0 or k == len(y) - 1:
        return float(f[k])
    y0, y1, y2 = y[k - 1], y[k], y[k + 1]
    den = y0 - 2 * y1 + y2
    if den >= 0:
        return float(f[k])
    h = f[k + 1] - f[k]
    shift = 0.5 * (y0 - y2) / den
    return float(np.clip(f[k] + shift * h, f[k - 1], f[k + 1]))


@dataclass(frozen=True)
class MatchReport:
    grid: FrequencyGrid
    e_c: np.ndarray = field(repr=False)
    f0: float
    delta_f_N: float
    z_rad_at_f0: complex
    z_j_at_f0: complex
    z_rad: np.ndarray = field(repr=False)
    z_j: np.ndarray = field(repr=False)

    @property
    def peak_efficiency(self) -> float:
        return float(np.max(self.e_c))

    @property
    def lobe(self) -> slice:
        return fundamental_lobe(self.e_c)

    def summary(self) -> dict:
        return {
            "f0_GHz": self.f0 / 1e9,
            "delta_f_N_GHz": self.delta_f_N / 1e9,
            "peak_e_c": self.peak_efficiency,
            "Re_Zrad_f0_ohm": self.z_rad_at_f0.real,
            "Im_Zrad_f0_ohm": self.z_rad_at_f0.imag,
            "Re_Zj_f0_ohm": self.z_j_at_f0.real,
            "Im_Zj_f0_ohm": self.z_j_at_f0.imag,
        }

    def write_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["f_Hz", "Re_Zrad", "Im_Zrad", "Re_Zj", "Im_Zj", "e_c"])
            for f, zr, zj, e in zip(self.grid.frequencies, self.z_rad, self.z_j, self.e_c):
                wr.writerow([repr(float(f)), repr(zr.real), repr(zr.imag),
                             repr(zj.real), repr(zj.imag), repr(float(e))])
        return path

    def write_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.summary(), indent=2) + "\n")
        return path


def _interp_complex(x, xp, fp) -> complex:
    return complex(np.interp(x, xp, fp.real), np.interp(x, xp, fp.imag))


def match_report(sweep: ImpedanceSweep, j: JunctionModel) -> MatchReport:
    if sweep.space_tag != "aperture":
        raise ValueError("match_report expects an aperture-space sweep")
    f = sweep.frequencies
    z_j = np.atleast_1d(junction_impedance(j, f))
    e_c = np.atleast_1d(coupling_efficiency(sweep.z, z_j))
    f0 = refine_peak(f, e_c) if np.any(e_c > 0) else float(f[int(np.argmax(e_c))])
    return MatchReport(
        grid=sweep.grid,
        e_c=e_c,
        f0=f0,
        delta_f_N=noise_bandwidth(e_c, sweep.grid),
        z_rad_at_f0=_interp_complex(f0, f, sweep.z),
        z_j_at_f0=complex(junction_impedance(j, f0)),
        z_rad=np.asarray(sweep.z),
        z_j=z_j,
    )
