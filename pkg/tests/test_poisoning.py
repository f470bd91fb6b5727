from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from transmon_antenna.em import CONST, FrequencyGrid, ImpedanceSweep, blackbody_psd
from transmon_antenna.junction import JunctionModel, junction_impedance
from transmon_antenna.matching import match_report
from transmon_antenna.poisoning import (
    PoisoningReport,
    absorbed_power,
    effective_temperature,
    poisoning_rate,
    poisoning_report,
    rate_report,
)

F0, BW = 97e9, 1.8e9
J = JunctionModel(R_n=7e3, C_j=9e-15)


def box_match(f0=100e9, width=0.2e9):
    """Match report with e_c = 1 on a narrow band and 0 elsewhere."""
    g = FrequencyGrid(f0 - 1e9, f0 + 1e9, 2001)
    f = g.frequencies
    zj = junction_impedance(J, f)
    inside = np.abs(f - f0) <= width / 2 + 1
    z = np.where(inside, np.conj(zj), 1e-6 + 1e6j)
    return match_report(ImpedanceSweep(g, z, "aperture"), J)


def test_forward_rate_300mk():
    assert poisoning_rate(F0, BW, 0.3) == pytest.approx(300.0, rel=0.10)
    assert poisoning_rate(F0, BW, 0.3) == pytest.approx(328.2, rel=1e-3)


def test_inverse_temperature():
    assert effective_temperature(F0, BW, 300.0) == pytest.approx(0.298, abs=0.010)


@given(st.floats(20e9, 500e9), st.floats(1e6, 1e10), st.floats(1e-3, 1e6))
def test_round_trip(f0, bw, gamma):
    T = effective_temperature(f0, bw, gamma)
    assert poisoning_rate(f0, bw, T) == pytest.approx(gamma, rel=1e-10)


def test_unit_occupancy_point():
    T = effective_temperature(F0, BW, BW / (math.e - 1))
    assert T == pytest.approx(CONST.h * F0 / CONST.kB, rel=1e-12)


def test_limits():
    assert poisoning_rate(F0, 0.0, 0.3) == 0.0
    T = 1e4
    assert poisoning_rate(F0, BW, T) == pytest.approx(BW * CONST.kB * T / (CONST.h * F0), rel=1e-3)
    with pytest.raises(ValueError):
        poisoning_rate(0.0, BW, 0.3)
    with pytest.raises(ValueError):
        effective_temperature(F0, BW, 0.0)


@given(st.floats(50e9, 300e9), st.floats(1e8, 1e10), st.floats(0.05, 2), st.floats(1.01, 3))
def test_monotonicity(f0, bw, T, k):
    g = poisoning_rate(f0, bw, T)
    assert poisoning_rate(f0, bw, T * k) > g
    assert poisoning_rate(f0, bw * k, T) > g
    assert poisoning_rate(f0 * k, bw, T) < g


def test_approx_power_value():
    rep = rate_report(F0, BW, 0.3)
    assert rep.power_approx == pytest.approx(2.1e-20, rel=0.01)
    assert rep.gamma_pa == pytest.approx(rep.power_approx / (CONST.h * F0), rel=1e-12)


def test_narrow_band_exact_equals_approx():
    m = box_match()
    assert m.delta_f_N == pytest.approx(0.2e9, rel=0.01)
    exact = absorbed_power(m, 0.3, "exact")
    approx = absorbed_power(m, 0.3, "approx")
    assert exact == pytest.approx(approx, rel=1e-3)


def test_zero_temperature_and_bad_mode():
    m = box_match()
    assert absorbed_power(m, 0.0, "exact") == 0.0
    assert absorbed_power(m, 0.0, "approx") == 0.0
    with pytest.raises(ValueError):
        absorbed_power(m, 0.3, "fast")
    with pytest.raises(ValueError):
        absorbed_power(m, -1.0)


def test_report_consistency():
    m = box_match()
    rep = poisoning_report(m, 0.3)
    assert rep.gamma_pa == pytest.approx(rep.power_approx / (CONST.h * rep.f0), rel=1e-12)
    assert rep.power_exact <= blackbody_psd(m.grid.f_start, 0.3) * m.delta_f_N * 1.01
    doc = rep.to_dict()
    for key in ("f0_GHz", "delta_f_N_GHz", "T_mK", "gamma_pa_Hz", "power_W"):
        assert key in doc
    assert doc["T_mK"] == pytest.approx(300.0)
    with pytest.raises(ValueError):
        PoisoningReport(1, 1, -1, 0, 0, 0)
