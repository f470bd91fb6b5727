"""Geometry-to-report pipeline shared by the CLI and the acceptance suite."""

from __future__ import annotations

from dataclasses import dataclass

from .duality import sweep_to_aperture
from .em import FrequencyGrid, ImpedanceSweep
from .geometry import QubitGeometry, WireModel, build_dual_wire_model, discretize
from .junction import JunctionModel
from .matching import MatchReport, match_report
from .mom import SolverConfig, impedance_sweep


@dataclass(frozen=True)
class DeviceSweep:
    """Wire-space sweep of the dual model and the impedance the junction sees.

    For planar aperture devices ``z_rad`` is the Babinet image of ``z_wire``.
    For the 3D transmon the pads themselves radiate, so the two coincide
    (with the tag switched to qubit space).
    """

    geometry: QubitGeometry
    model: WireModel
    z_wire: ImpedanceSweep
    z_rad: ImpedanceSweep


def radiation_sweep(g: QubitGeometry, grid: FrequencyGrid,
                    cfg: SolverConfig = SolverConfig()) -> DeviceSweep:
    model = build_dual_wire_model(g)
    model.check_thin_wire(grid.f_stop)
    model = discretize(model, cfg.segments_per_wavelength, grid.f_stop)
    z_wire = impedance_sweep(model, grid, cfg)
    if g.is_aperture:
        z_rad = sweep_to_aperture(z_wire)
    else:
        z_rad = ImpedanceSweep(z_wire.grid, z_wire.z, "aperture")
    return DeviceSweep(g, model, z_wire, z_rad)


def device_match(g: QubitGeometry, j: JunctionModel, grid: FrequencyGrid,
                 cfg: SolverConfig = SolverConfig()) -> tuple[DeviceSweep, MatchReport]:
    sweep = radiation_sweep(g, grid, cfg)
    return sweep, match_report(sweep.z_rad, j)
