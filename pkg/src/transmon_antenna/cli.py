"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 a
reproduction check outside tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .em import FrequencyGrid
from .geometry import GeometryError, load_geometry
from .junction import junction_impedance, load_junction
from .matching import match_report
from .mom import SolverConfig, SolverError, dump_currents
from .pipeline import radiation_sweep
from .poisoning import effective_temperature, rate_report
from .radiative_t1 import T1Config, UnsupportedVariant, t1_report
from .reproduce import TARGETS, format_table, impedance_panels, run
from .svg import Panel, write_svg

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_REPRO = 0, 2, 3, 4

log = logging.getLogger("transmon_antenna")


class ConfigError(Exception):
    pass


def _window(ns) -> FrequencyGrid:
    try:
        return FrequencyGrid(ns.f_start_ghz * 1e9, ns.f_stop_ghz * 1e9, ns.n_points)
    except ValueError as exc:
        raise ConfigError(f"frequency window: {exc}") from exc


def _solver(ns) -> SolverConfig:
    try:
        return SolverConfig(segments_per_wavelength=ns.segments_per_wavelength)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _load(loader, path, what):
    try:
        return loader(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} file: {exc}") from exc
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{what} file {path}: {exc}") from exc


def _out_dir(ns) -> Path:
    out = Path(ns.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory: {exc}") from exc
    return out


def _maybe_dump(ns, sweep, grid, cfg) -> None:
    if ns.dump_currents is None:
        return
    f = grid.frequencies[grid.n_points // 2] if ns.dump_f_ghz is None else ns.dump_f_ghz * 1e9
    path = dump_currents(sweep.model, float(f), ns.dump_currents, cfg)
    log.info("currents at %.6g GHz written to %s", f / 1e9, path)


def cmd_sweep(ns) -> int:
    g = _load(load_geometry, ns.geometry, "geometry")
    j = _load(load_junction, ns.junction, "junction") if ns.junction else None
    grid, cfg = _window(ns), _solver(ns)
    out = _out_dir(ns)
    sweep = radiation_sweep(g, grid, cfg)
    f = grid.frequencies
    cols = {"Re_Zw": sweep.z_wire.z.real, "Im_Zw": sweep.z_wire.z.imag,
            "Re_Zrad": sweep.z_rad.z.real, "Im_Zrad": sweep.z_rad.z.imag}
    curves = {"Zrad": sweep.z_rad.z}
    if j is not None:
        zj = np.asarray(junction_impedance(j, f))
        cols.update({"Re_Zj": zj.real, "Im_Zj": zj.imag})
        curves["Zj*"] = np.conj(zj)
    with open(out / "impedance.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["f_Hz", *cols])
        for i, fi in enumerate(f):
            wr.writerow([repr(float(fi)), *(repr(float(c[i])) for c in cols.values())])
    write_svg(out / "impedance.svg", impedance_panels(g.variant, f, curves))
    _maybe_dump(ns, sweep, grid, cfg)
    print(f"wrote {out / 'impedance.csv'} and {out / 'impedance.svg'}")
    return EXIT_OK


def cmd_match(ns) -> int:
    if not ns.junction:
        raise ConfigError("match needs --junction")
    g = _load(load_geometry, ns.geometry, "geometry")
    j = _load(load_junction, ns.junction, "junction")
    grid, cfg = _window(ns), _solver(ns)
    out = _out_dir(ns)
    sweep = radiation_sweep(g, grid, cfg)
    rep = match_report(sweep.z_rad, j)
    rep.write_csv(out / "match.csv")
    rep.write_json(out / "match.json")
    f = grid.frequencies
    eff = Panel("coupling efficiency", "frequency (GHz)", "e_c")
    eff.add(f / 1e9, rep.e_c, "e_c")
    write_svg(out / "match.svg",
              impedance_panels(g.variant, f, {"Zrad": sweep.z_rad.z, "Zj*": np.conj(rep.z_j)})
              + [eff])
    _maybe_dump(ns, sweep, grid, cfg)
    print(json.dumps(rep.summary(), indent=2))
    return EXIT_OK


def cmd_poison(ns) -> int:
    f0, bw = ns.f0_ghz * 1e9, ns.delta_f_ghz * 1e9
    try:
        if ns.t_mk is not None:
            doc = rate_report(f0, bw, ns.t_mk * 1e-3).to_dict()
        else:
            T = effective_temperature(f0, bw, ns.gamma_hz)
            doc = rate_report(f0, bw, T).to_dict()
            doc["gamma_pa_Hz"] = ns.gamma_hz
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    text = json.dumps(doc, indent=2)
    if ns.out:
        _out_dir(ns)
        (Path(ns.out) / "poison.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_t1(ns) -> int:
    um = 1e-6
    try:
        cfg = T1Config(
            C_qubit=ns.c_ff * 1e-15, f01=ns.f01_ghz * 1e9, eps_eff=ns.eps_eff,
            r_i=None if ns.r_um is None else ns.r_um * um,
            gap_w=None if ns.gap_um is None else ns.gap_um * um,
            area=None if ns.area_um2 is None else ns.area_um2 * um * um,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    doc = t1_report(cfg, ns.method, SolverConfig(segments_per_wavelength=ns.segments_per_wavelength))
    text = json.dumps(doc, indent=2)
    if ns.out:
        _out_dir(ns)
        (Path(ns.out) / "t1.json").write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_reproduce(ns) -> int:
    targets = list(TARGETS) if "all" in ns.figure else ns.figure
    unknown = [t for t in targets if t not in TARGETS]
    if unknown:
        raise ConfigError(f"unknown figure id(s) {unknown}; choose from {list(TARGETS)} or all")
    out = _out_dir(ns)
    checks = run(targets, out, _solver(ns))
    print(format_table(checks))
    failed = sum(not c.passed for c in checks)
    print(f"\n{len(checks) - failed} passed, {failed} failed; summary in {out / 'summary.csv'}")
    return EXIT_REPRO if failed else EXIT_OK


def _add_window(p, out_default):
    p.add_argument("--geometry", required=True, help="qubit geometry JSON")
    p.add_argument("--junction", help="junction JSON")
    p.add_argument("--f-start-ghz", type=float, required=True)
    p.add_argument("--f-stop-ghz", type=float, required=True)
    p.add_argument("--n-points", type=int, default=201)
    p.add_argument("--out", default=out_default, help="output directory")
    p.add_argument("--dump-currents", metavar="PATH", help="write segment currents to CSV")
    p.add_argument("--dump-f-ghz", type=float,
                   help="frequency for --dump-currents (default: window centre)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="transmon-antenna",
        description="Antenna-mode analysis of transmon qubits via thin-wire duals.",
    )
    ap.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--segments-per-wavelength", type=int, default=20)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="radiation impedance sweep")
    _add_window(p, "sweep_out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("match", parents=[common], help="coupling efficiency and noise bandwidth")
    _add_window(p, "match_out")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("poison", help="photon-assisted poisoning rate or temperature")
    p.add_argument("--f0-ghz", type=float, required=True)
    p.add_argument("--delta-f-ghz", type=float, required=True)
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--t-mk", type=float, help="blackbody temperature")
    grp.add_argument("--gamma-hz", type=float, help="observed poisoning rate to invert")
    p.add_argument("--out", help="also write poison.json here")
    p.set_defaults(func=cmd_poison)

    p = sub.add_parser("t1", parents=[common], help="radiative T1 of a small island")
    p.add_argument("--c-ff", type=float, required=True, help="qubit capacitance")
    p.add_argument("--f01-ghz", type=float, required=True)
    p.add_argument("--eps-eff", type=float, default=1.0)
    shape = p.add_mutually_exclusive_group(required=True)
    shape.add_argument("--r-um", type=float, help="circular island radius")
    shape.add_argument("--area-um2", type=float, help="island area")
    p.add_argument("--gap-um", type=float, help="gap to ground (circular island)")
    p.add_argument("--method", choices=("analytic", "mom"), default="analytic")
    p.add_argument("--out", help="also write t1.json here")
    p.set_defaults(func=cmd_t1)

    p = sub.add_parser("reproduce", parents=[common], help="run canned reproductions")
    p.add_argument("figure", nargs="+", help=f"one or more of {', '.join(TARGETS)}, all")
    p.add_argument("--out", default="reproduce_out")
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return ns.func(ns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedVariant as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
