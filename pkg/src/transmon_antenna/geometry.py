"""Transmon layouts and their thin-wire antenna duals.

Each planar layout is described by the metal/gap dimensions of the qubit.
Its dual wire antenna puts a round wire along the centre line of every gap
(slot) of the layout, with the strip-equivalent radius ``a = w/4`` for a gap
of width ``w``.  The junction location becomes the delta-gap feed.

The 3D transmon is already a wire-type antenna (two metal pads), so its
"dual" model is the structure itself.

All lengths are in metres.  JSON documents use micrometres, marked by an
``_um`` key suffix.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import ClassVar

import numpy as np

from .em import C0, Medium, effective_permittivity

log = logging.getLogger(__name__)

Point = tuple[float, float, float]

TOPOLOGIES = ("loop", "folded_dipole", "doubled_folded_dipole", "dipole", "xmon_cross")

# Thin-wire validity at construction: radius below a fifth of each wire.
MAX_RADIUS_FRACTION = 0.2
DEFAULT_FACETS = 64


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Wire:
    """Straight round wire between two points."""

    start: Point
    end: Point
    radius: float

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)

    @property
    def midpoint(self) -> Point:
        return tuple((s + e) / 2 for s, e in zip(self.start, self.end))

    def split(self, n: int) -> list[Wire]:
        p0 = np.asarray(self.start)
        p1 = np.asarray(self.end)
        pts = [tuple(map(float, p0 + (p1 - p0) * i / n)) for i in range(n + 1)]
        # Keep the original endpoints bit-exact so closures survive refinement.
        pts[0], pts[-1] = self.start, self.end
        return [Wire(pts[i], pts[i + 1], self.radius) for i in range(n)]


@dataclass(frozen=True)
class WireModel:
    """Thin-wire antenna: ordered straight wires with one delta-gap feed.

    The feed sits at the midpoint of ``segments[feed_segment_index]``.
    ``discretized`` marks models already refined for the solver, in which
    every entry of ``segments`` is one MoM segment.
    """

    segments: tuple[Wire, ...]
    feed_segment_index: int
    medium: Medium
    topology_tag: str
    discretized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise GeometryError("wire model has no segments")
        if not 0 <= self.feed_segment_index < len(self.segments):
            raise GeometryError(f"feed index {self.feed_segment_index} out of range")
        if self.topology_tag not in TOPOLOGIES:
            raise GeometryError(f"unknown topology {self.topology_tag!r}")
        for i, w in enumerate(self.segments):
            if not (w.length > 0 and w.radius > 0):
                raise GeometryError(f"segment {i} has non-positive length or radius")
        if _count_components(self.segments, self.node_tolerance) != 1:
            raise GeometryError("wire segments do not form a connected structure")

    @property
    def extent(self) -> float:
        pts = np.array([p for w in self.segments for p in (w.start, w.end)])
        return float(np.max(np.ptp(pts, axis=0)))

    @property
    def node_tolerance(self) -> float:
        # Absolute floor keeps closure checks at the 1e-12 m level.
        return max(1e-12, 1e-9 * self.extent)

    @property
    def feed_segment(self) -> Wire:
        return self.segments[self.feed_segment_index]

    @property
    def total_length(self) -> float:
        return sum(w.length for w in self.segments)

    def check_thin_wire(self, f_max: float | None = None) -> None:
        """Raise if any wire is too fat for the thin-wire kernel."""
        for i, w in enumerate(self.segments):
            if w.radius >= MAX_RADIUS_FRACTION * w.length:
                raise GeometryError(
                    f"wire {i}: radius {w.radius:.3g} m is not below "
                    f"{MAX_RADIUS_FRACTION} x length {w.length:.3g} m"
                )
        if f_max is not None:
            lam = self.medium.wavelength(f_max)
            a_max = max(w.radius for w in self.segments)
            if a_max >= MAX_RADIUS_FRACTION * lam / (2 * math.pi):
                raise GeometryError(
                    f"wire radius {a_max:.3g} m is not small against the "
                    f"wavelength {lam:.3g} m at {f_max / 1e9:.4g} GHz"
                )


def _count_components(segments, tol) -> int:
    node_ids = _node_ids(segments, tol)
    parent = list(range(int(node_ids.max()) + 1))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in node_ids:
        parent[find(a)] = find(b)
    return len({find(i) for i in range(len(parent))})


def _node_ids(segments, tol) -> np.ndarray:
    """Map segment endpoints to shared node indices, shape (n_seg, 2)."""
    pts = np.array([p for w in segments for p in (w.start, w.end)], dtype=float)
    ids = -np.ones(len(pts), dtype=int)
    nodes: list[np.ndarray] = []
    for i, p in enumerate(pts):
        for j, q in enumerate(nodes):
            if np.max(np.abs(p - q)) <= tol:
                ids[i] = j
                break
        else:
            ids[i] = len(nodes)
            nodes.append(p)
    return ids.reshape(-1, 2)


def node_table(model: WireModel) -> tuple[np.ndarray, np.ndarray]:
    """Return (node_ids per segment, node coordinates)."""
    ids = _node_ids(model.segments, model.node_tolerance)
    coords = np.zeros((ids.max() + 1, 3))
    for w, (a, b) in zip(model.segments, ids):
        coords[a] = w.start
        coords[b] = w.end
    return ids, coords


# --------------------------------------------------------------------------
# Qubit layouts


@dataclass(frozen=True)
class QubitGeometry:
    """Base for the parametric qubit layouts."""

    variant: ClassVar[str] = ""
    # False for structures whose metal is itself the radiator.
    is_aperture: ClassVar[bool] = True
    _may_be_zero: ClassVar[tuple[str, ...]] = ()

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "substrate_eps":
                if v < 1:
                    raise GeometryError(f"substrate_eps must be >= 1, got {v}")
            elif f.name in self._may_be_zero:
                if v < 0:
                    raise GeometryError(f"{f.name} must be non-negative, got {v}")
            elif isinstance(v, (int, float)) and f.name != "n_facets" and not v > 0:
                raise GeometryError(f"{f.name} must be positive, got {v}")
        self._check()

    def _check(self) -> None:
        pass

    @property
    def eps_eff(self) -> float:
        return effective_permittivity(self.substrate_eps)

    def wire_medium(self) -> Medium:
        """Medium of the dual wire model.

        A planar aperture on a substrate sits in ``eps_eff``; its wire dual
        lives in a magnetic medium with ``mu_rel = eps_eff``.
        """
        if self.is_aperture:
            return Medium(eps_rel=1.0, mu_rel=self.eps_eff)
        return Medium(eps_rel=self.eps_eff, mu_rel=1.0)


@dataclass(frozen=True)
class CircularTransmon(QubitGeometry):
    r_island: float
    gap_w: float
    substrate_eps: float = 11.0
    n_facets: int = DEFAULT_FACETS

    variant: ClassVar[str] = "circular"

    def _check(self):
        if self.n_facets < 8:
            raise GeometryError("a loop needs at least 8 facets")

    @property
    def loop_radius(self) -> float:
        return self.r_island + self.gap_w / 2

    @property
    def perimeter(self) -> float:
        """Perimeter at the centre of the gap."""
        return 2 * math.pi * self.loop_radius

    @classmethod
    def from_aspect_ratio(cls, perimeter: float, p_over_w: float, **kw) -> CircularTransmon:
        w = perimeter / p_over_w
        return cls(r_island=perimeter / (2 * math.pi) - w / 2, gap_w=w, **kw)


@dataclass(frozen=True)
class RectangularTransmon(QubitGeometry):
    length_l: float
    width_w: float
    gap_w: float
    substrate_eps: float = 11.0

    variant: ClassVar[str] = "rectangular"

    @property
    def perimeter(self) -> float:
        return 2 * (self.length_l + self.width_w) + 4 * self.gap_w

    @classmethod
    def from_aspect_ratio(
        cls, perimeter: float, p_over_w: float, island_aspect: float = 4.0, **kw
    ) -> RectangularTransmon:
        """Island of ``length/width = island_aspect`` with mid-gap perimeter
        ``perimeter`` and gap ``perimeter / p_over_w``."""
        w = perimeter / p_over_w
        inner = perimeter / 2 - 2 * w
        width = inner / (1 + island_aspect)
        return cls(length_l=inner - width, width_w=width, gap_w=w, **kw)


@dataclass(frozen=True)
class Xmon(QubitGeometry):
    arm_l: float
    trace_s: float
    gap_w: float
    substrate_eps: float = 11.0

    variant: ClassVar[str] = "xmon"

    def _check(self):
        if self.trace_s >= self.arm_l or self.gap_w >= self.arm_l:
            raise GeometryError("trace and gap must be smaller than the arm length")

    @property
    def span(self) -> float:
        """Tip-to-tip extent of the dual cross (gap centre line)."""
        return 2 * self.arm_l + self.trace_s + self.gap_w


@dataclass(frozen=True)
class DifferentialTransmon(QubitGeometry):
    island_l: float
    island_w: float
    gap_w: float
    island_sep: float
    substrate_eps: float = 11.0

    variant: ClassVar[str] = "differential"

    def _check(self):
        if max(self.gap_w, self.island_sep) >= min(self.island_l, 2 * self.island_w):
            raise GeometryError("gaps must be smaller than the islands")

    @property
    def branch_spacing(self) -> float:
        """Distance between the fed branch and each return branch."""
        return self.island_sep / 2 + self.island_w + self.gap_w / 2


@dataclass(frozen=True)
class ThreeDTransmon(QubitGeometry):
    """Two collinear pads joined through the junction.

    ``lead_w`` is the width of the narrow lead bridging ``feed_gap``; by
    default the lead is as wide as the pads, i.e. a plain strip dipole.
    """

    pad_l: float
    pad_w: float
    feed_gap: float
    substrate_eps: float = 11.0
    lead_w: float | None = None

    variant: ClassVar[str] = "3d"
    is_aperture: ClassVar[bool] = False
    _may_be_zero: ClassVar[tuple[str, ...]] = ("feed_gap",)

    def _check(self):
        if self.lead_w is not None and self.lead_w <= 0:
            raise GeometryError("lead_w must be positive")

    @property
    def total_length(self) -> float:
        return 2 * self.pad_l + self.feed_gap

    def dipole_resonances(self, n_modes: int = 3) -> list[float]:
        """Frequencies where the length is an odd number of half wavelengths
        in the effective medium."""
        v = C0 / math.sqrt(self.eps_eff)
        return [(2 * i + 1) * v / (2 * self.total_length) for i in range(n_modes)]


# --------------------------------------------------------------------------
# Dual wire models


def _polyline(points, radius, closed=True) -> list[Wire]:
    n = len(points)
    last = n if closed else n - 1
    return [Wire(points[i], points[(i + 1) % n], radius) for i in range(last)]


def _loop_model(g: CircularTransmon) -> WireModel:
    r = g.loop_radius
    a = g.gap_w / 4
    facet_limit = int(2 * math.pi * r / (a / MAX_RADIUS_FRACTION) * (1 - 1e-12))
    n = min(g.n_facets, facet_limit)
    if n < 8:
        raise GeometryError(
            f"gap {g.gap_w:.3g} m too wide for a thin-wire loop of radius {r:.3g} m"
        )
    # Vertex 0 and 1 straddle -y so facet 0 (the feed) is centred there.
    phis = -math.pi / 2 - math.pi / n + 2 * math.pi * np.arange(n) / n
    pts = [(r * math.cos(p), r * math.sin(p), 0.0) for p in phis]
    return WireModel(tuple(_polyline(pts, a)), 0, g.wire_medium(), "loop")


def _rectangle_model(g: RectangularTransmon) -> WireModel:
    x = (g.length_l + g.gap_w) / 2
    y = (g.width_w + g.gap_w) / 2
    pts = [(-x, -y, 0.0), (x, -y, 0.0), (x, y, 0.0), (-x, y, 0.0)]
    return WireModel(tuple(_polyline(pts, g.gap_w / 4)), 0, g.wire_medium(), "folded_dipole")


def _xmon_model(g: Xmon) -> WireModel:
    h = (g.trace_s + g.gap_w) / 2
    tip = g.trace_s / 2 + g.arm_l + g.gap_w / 2
    # Gap centre line around the cross, starting with the bottom tip where
    # the junction bridges the gap to ground.
    outline = [
        (-h, -tip), (h, -tip), (h, -h), (tip, -h), (tip, h), (h, h),
        (h, tip), (-h, tip), (-h, h), (-tip, h), (-tip, -h), (-h, -h),
    ]
    pts = [(x, y, 0.0) for x, y in outline]
    return WireModel(tuple(_polyline(pts, g.gap_w / 4)), 0, g.wire_medium(), "xmon_cross")


def _differential_model(g: DifferentialTransmon) -> WireModel:
    x = (g.island_l + g.gap_w) / 2
    y = g.branch_spacing
    a_out = g.gap_w / 4
    wires = [
        Wire((-x, 0.0, 0.0), (x, 0.0, 0.0), g.island_sep / 4),  # fed branch
        Wire((-x, -y, 0.0), (x, -y, 0.0), a_out),
        Wire((x, -y, 0.0), (x, 0.0, 0.0), a_out),
        Wire((x, 0.0, 0.0), (x, y, 0.0), a_out),
        Wire((x, y, 0.0), (-x, y, 0.0), a_out),
        Wire((-x, y, 0.0), (-x, 0.0, 0.0), a_out),
        Wire((-x, 0.0, 0.0), (-x, -y, 0.0), a_out),
    ]
    return WireModel(tuple(wires), 0, g.wire_medium(), "doubled_folded_dipole")


def _dipole_model(g: ThreeDTransmon) -> WireModel:
    a_pad = g.pad_w / 4
    half = g.total_length / 2
    if g.feed_gap == 0:
        wires = (Wire((-half, 0.0, 0.0), (half, 0.0, 0.0), a_pad),)
        return WireModel(wires, 0, g.wire_medium(), "dipole")
    a_lead = a_pad if g.lead_w is None else g.lead_w / 4
    gap = g.feed_gap / 2
    wires = (
        Wire((-half, 0.0, 0.0), (-gap, 0.0, 0.0), a_pad),
        Wire((-gap, 0.0, 0.0), (gap, 0.0, 0.0), a_lead),
        Wire((gap, 0.0, 0.0), (half, 0.0, 0.0), a_pad),
    )
    return WireModel(wires, 1, g.wire_medium(), "dipole")


_BUILDERS = {
    CircularTransmon: _loop_model,
    RectangularTransmon: _rectangle_model,
    Xmon: _xmon_model,
    DifferentialTransmon: _differential_model,
    ThreeDTransmon: _dipole_model,
}


def build_dual_wire_model(g: QubitGeometry) -> WireModel:
    """Construct the thin-wire antenna that the solver analyses for ``g``."""
    try:
        builder = _BUILDERS[type(g)]
    except KeyError:
        raise GeometryError(f"no wire dual for {type(g).__name__}") from None
    model = builder(g)
    model.check_thin_wire()
    return model


def straight_dipole(length: float, radius: float, medium: Medium = Medium()) -> WireModel:
    """Centre-fed straight dipole along x."""
    w = Wire((-length / 2, 0.0, 0.0), (length / 2, 0.0, 0.0), radius)
    return WireModel((w,), 0, medium, "dipole")


def folded_dipole(length: float, spacing: float, radius: float,
                  medium: Medium = Medium()) -> WireModel:
    """Two parallel wires shorted at the ends, fed at the centre of one."""
    x, y = length / 2, spacing / 2
    pts = [(-x, -y, 0.0), (x, -y, 0.0), (x, y, 0.0), (-x, y, 0.0)]
    return WireModel(tuple(_polyline(pts, radius)), 0, medium, "folded_dipole")


def circular_loop(radius: float, wire_radius: float, n_facets: int = DEFAULT_FACETS,
                  medium: Medium = Medium()) -> WireModel:
    phis = -math.pi / 2 - math.pi / n_facets + 2 * math.pi * np.arange(n_facets) / n_facets
    pts = [(radius * math.cos(p), radius * math.sin(p), 0.0) for p in phis]
    return WireModel(tuple(_polyline(pts, wire_radius)), 0, medium, "loop")


# --------------------------------------------------------------------------
# Discretization


MIN_SEGMENTS_PER_WAVELENGTH = 10


def _piece_count(w: Wire, max_len: float, hard_max: float, odd: bool) -> int | None:
    """Number of equal pieces for ``w``.

    The smallest count meeting ``max_len`` is used when its pieces stay at
    least ``2a`` long.  Otherwise fewer, longer pieces are accepted as long
    as they stay within ``hard_max``; such cases are logged.
    """
    n0 = max(1, math.ceil(w.length / max_len * (1 - 1e-12)))
    if odd and n0 % 2 == 0:
        n0 += 1
    for n in range(n0, 0, -1):
        if odd and n % 2 == 0:
            continue
        piece = w.length / n
        if piece > hard_max * (1 + 1e-12):
            return None
        if piece >= 2 * w.radius:
            if n != n0:
                log.info("wire of length %.3g m cut into %d pieces (%.3g m each, above "
                         "the requested %.3g m) to respect the kernel limit",
                         w.length, n, piece, max_len)
            return n
    return None


def discretize(m: WireModel, segments_per_wavelength: int, f_max: float) -> WireModel:
    """Split every wire so no MoM segment exceeds ``lambda_min / spw``.

    The feed wire is cut into an odd number of pieces and the centre piece
    becomes the feed segment, so the feed stays at the same point.
    """
    if segments_per_wavelength < 10:
        raise GeometryError("segments_per_wavelength must be >= 10")
    if not f_max > 0:
        raise GeometryError("f_max must be positive")
    lam_min = m.medium.wavelength(f_max)
    max_len = lam_min / segments_per_wavelength
    out: list[Wire] = []
    feed = -1
    for i, w in enumerate(m.segments):
        n = _piece_count(w, max_len, lam_min / MIN_SEGMENTS_PER_WAVELENGTH,
                         odd=i == m.feed_segment_index)
        if n is None:
            raise GeometryError(
                f"wire {i}: cannot cut {w.length:.3g} m into pieces no shorter than "
                f"twice the radius {w.radius:.3g} m at {f_max / 1e9:.4g} GHz; "
                "lower segments_per_wavelength or f_max"
            )
        if i == m.feed_segment_index:
            feed = len(out) + n // 2
        out.extend(w.split(n))
    return replace(m, segments=tuple(out), feed_segment_index=feed, discretized=True)


# --------------------------------------------------------------------------
# JSON ingestion

_JSON_KEYS = {
    "circular": (CircularTransmon, {"r_island_um": "r_island", "gap_w_um": "gap_w"}),
    "rectangular": (
        RectangularTransmon,
        {"length_l_um": "length_l", "width_w_um": "width_w", "gap_w_um": "gap_w"},
    ),
    "xmon": (Xmon, {"arm_l_um": "arm_l", "trace_s_um": "trace_s", "gap_w_um": "gap_w"}),
    "differential": (
        DifferentialTransmon,
        {"island_l_um": "island_l", "island_w_um": "island_w", "gap_w_um": "gap_w",
         "island_sep_um": "island_sep"},
    ),
    "3d": (
        ThreeDTransmon,
        {"pad_l_um": "pad_l", "pad_w_um": "pad_w", "feed_gap_um": "feed_gap"},
    ),
}
_OPTIONAL_KEYS = {"3d": {"lead_w_um": "lead_w"}, "circular": {"n_facets": "n_facets"}}


def geometry_from_dict(doc: dict) -> QubitGeometry:
    doc = dict(doc)
    variant = doc.pop("variant", None)
    if variant not in _JSON_KEYS:
        raise GeometryError(
            f"unknown or missing variant {variant!r}; expected one of {sorted(_JSON_KEYS)}"
        )
    cls, required = _JSON_KEYS[variant]
    optional = _OPTIONAL_KEYS.get(variant, {})
    unknown = set(doc) - set(required) - set(optional) - {"substrate_eps"}
    if unknown:
        raise GeometryError(f"unknown keys for {variant}: {sorted(unknown)}")
    missing = set(required) - set(doc)
    if missing:
        raise GeometryError(f"missing keys for {variant}: {sorted(missing)}")
    kwargs = {}
    for key, name in {**required, **optional}.items():
        if key in doc:
            v = doc[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise GeometryError(f"{key} must be a number")
            kwargs[name] = int(v) if key == "n_facets" else float(v) * 1e-6
    if "substrate_eps" in doc:
        kwargs["substrate_eps"] = float(doc["substrate_eps"])
    return cls(**kwargs)


def geometry_to_dict(g: QubitGeometry) -> dict:
    _, required = _JSON_KEYS[g.variant]
    optional = _OPTIONAL_KEYS.get(g.variant, {})
    doc = {"variant": g.variant}
    for key, name in {**required, **optional}.items():
        v = getattr(g, name)
        if v is None:
            continue
        if key == "n_facets":
            if v != DEFAULT_FACETS:
                doc[key] = v
        else:
            doc[key] = round(v * 1e6, 9)
    doc["substrate_eps"] = g.substrate_eps
    return doc


def load_geometry(path: str | Path) -> QubitGeometry:
    with open(path) as fh:
        return geometry_from_dict(json.load(fh))
