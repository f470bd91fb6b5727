from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from transmon_antenna.em import C0, Medium
from transmon_antenna.geometry import (
    CircularTransmon,
    DifferentialTransmon,
    GeometryError,
    RectangularTransmon,
    ThreeDTransmon,
    Wire,
    WireModel,
    Xmon,
    build_dual_wire_model,
    circular_loop,
    discretize,
    geometry_from_dict,
    geometry_to_dict,
    load_geometry,
    node_table,
    straight_dipole,
)
from transmon_antenna.mom import impedance_sweep
from transmon_antenna.em import FrequencyGrid

UM = 1e-6


def _perimeter(m: WireModel) -> float:
    return sum(w.length for w in m.segments)


def test_circular_dual_loop():
    g = CircularTransmon.from_aspect_ratio(1e-3, 100, substrate_eps=11)
    m = build_dual_wire_model(g)
    assert m.topology_tag == "loop"
    assert m.medium == Medium(eps_rel=1.0, mu_rel=6.0)
    assert all(w.radius == pytest.approx(1e-5 / 4) for w in m.segments)
    # Closed loop and perimeter within polygon error.
    assert m.segments[0].start == m.segments[-1].end
    assert _perimeter(m) == pytest.approx(1e-3, rel=5e-3)
    assert g.perimeter == pytest.approx(1e-3)


def test_circular_perimeter_matches_mid_gap_circle():
    g = CircularTransmon(r_island=100 * UM, gap_w=10 * UM)
    assert _perimeter(build_dual_wire_model(g)) == pytest.approx(
        2 * math.pi * 105 * UM, rel=5e-3)


def test_xmon_span():
    g = Xmon(arm_l=130 * UM, trace_s=8 * UM, gap_w=4 * UM)
    m = build_dual_wire_model(g)
    pts = np.array([p for w in m.segments for p in (w.start, w.end)])
    span = np.ptp(pts[:, 1])
    # Tip-to-tip along the gap centre line: 2 l + s plus half a gap at each end.
    assert span == pytest.approx(2 * 130 * UM + 8 * UM + 4 * UM)
    assert g.span == pytest.approx(span)
    assert m.topology_tag == "xmon_cross"
    feed = m.feed_segment
    assert feed.midpoint[0] == pytest.approx(0.0)
    assert feed.midpoint[1] == pytest.approx(pts[:, 1].min())


def test_rectangular_and_differential_topologies():
    r = build_dual_wire_model(RectangularTransmon(400 * UM, 100 * UM, 10 * UM))
    assert r.topology_tag == "folded_dipole" and len(r.segments) == 4
    d = build_dual_wire_model(DifferentialTransmon(400 * UM, 150 * UM, 20 * UM, 20 * UM))
    assert d.topology_tag == "doubled_folded_dipole"
    ids, _ = node_table(d)
    degree = np.bincount(ids.ravel())
    # The fed branch meets both return branches at two three-way nodes.
    assert sorted(degree.tolist()).count(3) == 2


def test_3d_degenerate_gap_is_plain_dipole():
    g = ThreeDTransmon(pad_l=500 * UM, pad_w=10 * UM, feed_gap=0.0, substrate_eps=1.0)
    m = build_dual_wire_model(g)
    ref = straight_dipole(1e-3, 2.5 * UM, Medium(eps_rel=1.0))
    assert m.segments == ref.segments
    assert m.medium == ref.medium


def test_3d_lead_and_resonances():
    g = ThreeDTransmon(100 * UM, 10 * UM, 200 * UM, 11.0, lead_w=1 * UM)
    m = build_dual_wire_model(g)
    assert [w.radius for w in m.segments] == pytest.approx([2.5 * UM, 0.25 * UM, 2.5 * UM])
    assert m.feed_segment_index == 1
    assert m.medium == Medium(eps_rel=6.0)
    f1, f3, f5 = g.dipole_resonances()
    assert f1 == pytest.approx(C0 / math.sqrt(6) / (2 * 400 * UM))
    assert (f3 / f1, f5 / f1) == pytest.approx((3, 5))


def test_build_is_deterministic():
    g = Xmon(165 * UM, 24 * UM, 24 * UM)
    assert build_dual_wire_model(g) == build_dual_wire_model(g)


@pytest.mark.parametrize("make", [
    lambda: CircularTransmon(r_island=-1.0, gap_w=1e-5),
    lambda: Xmon(10 * UM, 20 * UM, 4 * UM),
    lambda: CircularTransmon(r_island=10 * UM, gap_w=50 * UM),
    lambda: DifferentialTransmon(400 * UM, 10 * UM, 30 * UM, 20 * UM),
    lambda: ThreeDTransmon(100 * UM, 10 * UM, 0.0, substrate_eps=0.5),
])
def test_invalid_geometries(make):
    with pytest.raises(GeometryError):
        build_dual_wire_model(make())


def test_wire_model_validation():
    w = Wire((0, 0, 0), (1, 0, 0), 0.01)
    with pytest.raises(GeometryError):
        WireModel((w,), 1, Medium(), "dipole")
    with pytest.raises(GeometryError):
        WireModel((w,), 0, Medium(), "helix")
    with pytest.raises(GeometryError, match="connected"):
        WireModel((w, Wire((0, 1, 0), (1, 1, 0), 0.01)), 0, Medium(), "dipole")


def test_thin_wire_check():
    with pytest.raises(GeometryError):
        straight_dipole(1.0, 0.3).check_thin_wire()
    with pytest.raises(GeometryError, match="wavelength"):
        straight_dipole(1.0, 0.01).check_thin_wire(f_max=10e9)


def test_discretize_wavelength_rule():
    lam = 1.0
    m = discretize(straight_dipole(lam, 1e-4), 20, C0 / lam)
    assert len(m.segments) >= 20
    assert max(w.length for w in m.segments) <= lam / 20 * (1 + 1e-12)
    assert m.feed_segment.midpoint[0] == pytest.approx(0.0, abs=1e-15)
    assert m.discretized


def test_discretize_keeps_loop_closed():
    m = discretize(circular_loop(0.1, 1e-4, 16), 40, 3e9)
    assert m.segments[0].start == m.segments[-1].end
    for a, b in zip(m.segments, m.segments[1:]):
        assert a.end == b.start


def test_discretize_rejects_impossible_cut():
    with pytest.raises(GeometryError):
        discretize(straight_dipole(1.0, 0.05), 10, 3e9)
    with pytest.raises(GeometryError):
        discretize(straight_dipole(1.0, 1e-4), 5, 3e9)


@given(st.floats(0.05, 2.0), st.integers(10, 40), st.floats(0.2, 3.0))
def test_discretize_preserves_feed_location(length, spw, f_ghz):
    m = discretize(straight_dipole(length, length / 1e4), spw, f_ghz * 1e9)
    assert m.feed_segment.midpoint[0] == pytest.approx(0.0, abs=1e-12 * length)
    assert sum(w.length for w in m.segments) == pytest.approx(length)


def test_segment_halving_converges():
    # Dipole near resonance, meshed for a sweep reaching twice the resonance
    # (21 segments); halving the segment length moves Z by < 2 %.
    m = straight_dipole(1.0, 5e-4)
    f = 0.48 * C0
    z = []
    for spw in (20, 40):
        fine = discretize(m, spw, 2 * f)
        z.append(impedance_sweep(fine, FrequencyGrid.single(f)).z[0])
    assert abs(z[1] - z[0]) / abs(z[1]) < 0.02


def test_loop_facet_doubling_moves_resonance_under_one_percent():
    f = np.linspace(100e9, 160e9, 61)
    grid = FrequencyGrid(f[0], f[-1], len(f))
    peaks = []
    for n in (32, 64):
        g = CircularTransmon.from_aspect_ratio(1e-3, 100, n_facets=n)
        z = impedance_sweep(build_dual_wire_model(g), grid).z
        # One-wavelength loop resonance: reactance crosses zero upwards.
        i = int(np.nonzero((z.imag[:-1] < 0) & (z.imag[1:] >= 0))[0][0])
        peaks.append(f[i] - z.imag[i] * (f[i + 1] - f[i]) / (z.imag[i + 1] - z.imag[i]))
    assert abs(peaks[1] / peaks[0] - 1) < 0.01


def test_json_round_trip(tmp_path):
    doc = {"variant": "xmon", "arm_l_um": 130, "trace_s_um": 8, "gap_w_um": 4, "substrate_eps": 11}
    g = geometry_from_dict(doc)
    assert g == Xmon(130 * UM, 8 * UM, 4 * UM, 11.0)
    assert geometry_to_dict(g) == doc
    p = tmp_path / "g.json"
    p.write_text(json.dumps(doc))
    assert load_geometry(p) == g
    g3 = geometry_from_dict({"variant": "3d", "pad_l_um": 100, "pad_w_um": 10,
                             "feed_gap_um": 200, "lead_w_um": 1})
    assert g3.lead_w == pytest.approx(1 * UM)
    assert geometry_from_dict(geometry_to_dict(g3)) == g3


@pytest.mark.parametrize("doc", [
    {"variant": "xmon", "arm_l_um": 130, "trace_s_um": 8, "gap_w_um": 4, "colour": 1},
    {"variant": "xmon", "arm_l_um": 130, "trace_s_um": 8},
    {"variant": "hexagon"},
    {"variant": "xmon", "arm_l_um": "130", "trace_s_um": 8, "gap_w_um": 4},
    {"variant": "xmon", "arm_l": 130, "trace_s_um": 8, "gap_w_um": 4},
])
def test_json_rejections(doc):
    with pytest.raises(GeometryError):
        geometry_from_dict(doc)
