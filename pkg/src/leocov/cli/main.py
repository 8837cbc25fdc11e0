"""``leocov`` command-line entry point.

Exit codes: 0 success, 2 validation error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from ..constellation import write_tle_file
from ..errors import ConfigurationError, DomainError, ExportError
from ..link_budget import LinkBudgetInputs, load_attenuation_table, total_path_loss
from . import presets
from .runner import run
from .scenario import (
    ScenarioError,
    dumps_toml,
    parse_override,
    scenario_from_dict,
    set_dotted,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3

_SHELL_RE = re.compile(r"^\s*([0-9.]+)\s*:\s*(\d+)\s*/\s*(\d+)\s*/\s*(\d+)\s*$")


def _shell_from_args(args) -> dict:
    if args.preset:
        try:
            shell = presets.preset_shell(args.preset)
        except KeyError as exc:
            raise ScenarioError(str(exc.args[0]), "--preset") from None
    else:
        shell = presets.preset_shell("paper-fig6")
    if args.shell:
        m = _SHELL_RE.match(args.shell)
        if not m:
            raise ScenarioError(f"{args.shell!r} is not i:T/P/F", "--shell")
        shell.update(inclination_deg=float(m[1]), total_sats=int(m[2]), planes=int(m[3]), phasing=int(m[4]))
    for flag, key in (("pattern", "pattern"), ("alt", "altitude_km"),
                      ("phasing_convention", "phasing_convention"), ("raan0", "raan0_deg"),
                      ("epoch", "epoch")):
        v = getattr(args, flag, None)
        if v is not None:
            shell[key] = v
    return shell


def _apply_common(doc: dict, args) -> dict:
    grid = doc.setdefault("grid", {})
    if args.days is not None:
        grid.pop("duration_s", None)
        grid["days"] = args.days
    if args.step is not None:
        grid["step_s"] = args.step
    if args.gmst0 is not None:
        grid["gmst0_deg"] = args.gmst0
    if args.j2:
        grid["j2"] = True
    out = doc.setdefault("output", {})
    if args.out is not None:
        out["dir"] = args.out
    if args.workers is not None:
        out["workers"] = args.workers
    if args.products:
        out["products"] = args.products.split(",")
    for item in args.set or []:
        key, value = parse_override(item)
        set_dotted(doc, key, value)
    return doc


def _execute(doc: dict, source_text: str | None = None) -> int:
    sc = scenario_from_dict(doc)
    files = run(sc, source_text)
    for f in files:
        print(f)
    return EXIT_OK


def cmd_run(args) -> int:
    path = Path(args.scenario)
    if path.exists():
        text = path.read_text()
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"{path}: parse error: {exc}") from None
        # relative output directories are taken from the scenario's location
        out = doc.setdefault("output", {})
        if not isinstance(out, dict):
            raise ScenarioError("expected a table", "output")
        out_dir = Path(str(out.get("dir", "leocov-out")))
        if not out_dir.is_absolute():
            out["dir"] = str(path.parent / out_dir)
    else:
        try:
            doc = presets.get_preset(args.scenario)
        except KeyError:
            raise FileNotFoundError(f"no scenario file or preset named {args.scenario!r}") from None
        text = None
    return _execute(_apply_common(doc, args), text)


def cmd_sweep(args) -> int:
    doc = {
        "mode": "sweep",
        "shell": _shell_from_args(args),
        "sweep": {"param": args.param, "values": args.range, "lat": args.lat},
    }
    if args.mask is not None:
        doc["mask"] = {"eps_deg": args.mask}
    if args.lons:
        doc["sweep"]["lons"] = args.lons
    return _execute(_apply_common(doc, args))


def cmd_map(args) -> int:
    lat_min, lat_max, lon_min, lon_max = _region(args.region)
    doc = {
        "mode": "map",
        "shell": _shell_from_args(args),
        "mask": {"eps_deg": args.mask},
        "map": {"lat_min": lat_min, "lat_max": lat_max, "lon_min": lon_min,
                "lon_max": lon_max, "resolution": args.resolution},
    }
    return _execute(_apply_common(doc, args))


def _region(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(":"))
    except ValueError:
        vals = ()
    if len(vals) != 4:
        raise ScenarioError("expected lat_min:lat_max:lon_min:lon_max", "--region")
    return vals


def cmd_tle(args) -> int:
    doc = {"shell": _shell_from_args(args)}
    from .scenario import build_shell

    shell = build_shell(doc["shell"])
    path = write_tle_file(shell, args.out, with_names=not args.no_names)
    print(path)
    return EXIT_OK


def cmd_linkbudget(args) -> int:
    table = load_attenuation_table(args.atmos_table) if args.atmos_table else None
    res = total_path_loss(LinkBudgetInputs(args.freq, args.alt, args.elev), table)
    print(f"frequency     {args.freq:.6g} Hz")
    print(f"altitude      {args.alt:g} km")
    print(f"elevation     {args.elev:g} deg")
    print(f"slant range   {res.slant_range_km:.3f} km")
    print(f"FSPL          {res.fspl_db:.3f} dB")
    print(f"atmos excess  {res.atmos_excess_db:.3f} dB")
    print(f"total         {res.total_db:.3f} dB")
    print("freq_hz,alt_km,elev_deg,slant_range_km,fspl_db,atmos_excess_db,total_db")
    print(f"{args.freq:.6g},{args.alt:g},{args.elev:g},{res.slant_range_km:.6f},"
          f"{res.fspl_db:.6f},{res.atmos_excess_db:.6f},{res.total_db:.6f}")
    return EXIT_OK


def cmd_presets(args) -> int:
    if args.action == "list":
        for name in presets.preset_names():
            print(f"{name:18s} {presets.SCENARIOS[name].get('name', '')}")
        return EXIT_OK
    if not args.name:
        raise ScenarioError("presets show needs a preset name")
    try:
        doc = presets.get_preset(args.name)
    except KeyError as exc:
        raise ScenarioError(str(exc.args[0])) from None
    sys.stdout.write(dumps_toml(doc))
    return EXIT_OK


def _add_shell_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("shell")
    g.add_argument("--preset", help="take the shell from a preset")
    g.add_argument("--shell", help="Walker notation i:T/P/F")
    g.add_argument("--pattern", choices=["delta", "star"])
    g.add_argument("--alt", type=float, help="altitude in km")
    g.add_argument("--phasing-convention", choices=["paper-per-plane", "classic-per-sat"])
    g.add_argument("--raan0", type=float)
    g.add_argument("--epoch", help="ISO-8601 UTC epoch")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--days", type=float)
    g.add_argument("--step", type=float, help="time step in seconds")
    g.add_argument("--gmst0", type=float, help="Greenwich angle at grid start (deg)")
    g.add_argument("--j2", action="store_true", help="enable secular J2 nodal drift")
    g.add_argument("--out", help="output directory")
    g.add_argument("--workers", type=int)
    g.add_argument("--products", help="comma list of csv,geojson,tle,timeline,ephemeris")
    g.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override any scenario field, e.g. shell.raan0_deg=10")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="leocov", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a scenario file or a named preset")
    p.add_argument("scenario")
    _add_common_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="latitude sweep over elevation masks or inclinations")
    p.add_argument("--param", choices=["elevation", "inclination"], required=True)
    p.add_argument("--range", required=True, help="a:b:step of the swept parameter")
    p.add_argument("--lat", default="55:90:1", help="latitude axis a:b:step")
    p.add_argument("--lons", help="longitude axis a:b:step (default 0:315:45)")
    p.add_argument("--mask", type=float, help="fixed mask for inclination sweeps")
    _add_shell_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("map", help="coverage map over a lat/lon region")
    p.add_argument("--mask", type=float, required=True)
    p.add_argument("--region", default="50:90:-80:40", help="lat_min:lat_max:lon_min:lon_max")
    p.add_argument("--resolution", type=float, default=1.0)
    _add_shell_flags(p)
    _add_common_flags(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("tle", help="export two-line element sets")
    p.add_argument("--out", required=True)
    p.add_argument("--no-names", action="store_true", help="omit the name line")
    _add_shell_flags(p)
    p.set_defaults(func=cmd_tle)

    p = sub.add_parser("linkbudget", help="path loss for one frequency/altitude/elevation")
    p.add_argument("--freq", type=float, required=True, help="Hz")
    p.add_argument("--alt", type=float, required=True, help="km")
    p.add_argument("--elev", type=float, required=True, help="deg")
    p.add_argument("--atmos-table", help="CSV attenuation table")
    p.set_defaults(func=cmd_linkbudget)

    p = sub.add_parser("presets", help="list or show built-in scenarios")
    p.add_argument("action", choices=["list", "show"])
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, ExportError, ValueError) as exc:
        print(f"leocov: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"leocov: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
