"""Scenario files: TOML documents describing one reproducible experiment.

Grammar (all sections except ``[shell]`` optional)::

    mode = "single" | "sweep" | "map"
    name = "free text"

    [shell]       pattern, inclination_deg, total_sats, planes, phasing,
                  altitude_km, phasing_convention, raan0_deg, epoch
    [grid]        days | duration_s, step_s, start, gmst0_deg, j2
    [mask]        eps_deg
    [sweep]       param = "elevation" | "inclination", values, lat, lons
    [map]         lat_min, lat_max, lon_min, lon_max, resolution
    [[sites]]     lat, lon, alt
    [output]      dir, products, workers

Axes (``values``, ``lat``, ``lons``) are either arrays or ``"a:b:step"``
strings with an inclusive end point.
"""
from __future__ import annotations

import copy
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ..constellation import DEFAULT_EPOCH, PhasingConvention, WalkerPattern, WalkerShell
from ..errors import ConfigurationError, DomainError
from ..geo_core import GeoPoint
from ..metrics import NORTH_ATLANTIC, SWEEP_LONGITUDES, Region
from ..propagation import TimeGrid

MODES = ("single", "sweep", "map")
PRODUCTS = ("csv", "geojson", "tle", "timeline", "ephemeris")

DEFAULT_GRID = {"days": 5, "step_s": 10}

_SECTIONS = {
    "shell": {"pattern", "inclination_deg", "total_sats", "planes", "phasing", "altitude_km",
              "phasing_convention", "raan0_deg", "epoch"},
    "grid": {"days", "duration_s", "step_s", "start", "gmst0_deg", "j2"},
    "mask": {"eps_deg"},
    "sweep": {"param", "values", "lat", "lons"},
    "map": {"lat_min", "lat_max", "lon_min", "lon_max", "resolution"},
    "output": {"dir", "products", "workers"},
}
_TOP = {"mode", "name", "sites"} | set(_SECTIONS)


class ScenarioError(ConfigurationError):
    """Scenario text does not parse or violates an invariant; ``field``
    names the offending key."""

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


@dataclass(frozen=True)
class Scenario:
    mode: str
    shell: WalkerShell
    grid: TimeGrid
    gmst0_deg: float
    j2_enabled: bool
    mask_deg: float | None
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = ()
    lat_axis: tuple[float, ...] = ()
    lon_axis: tuple[float, ...] = SWEEP_LONGITUDES
    region: Region | None = None
    resolution: float = 1.0
    sites: tuple[GeoPoint, ...] = ()
    out_dir: Path = Path("leocov-out")
    products: tuple[str, ...] = ("csv",)
    workers: int | None = None
    name: str = ""
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def digest(self) -> str:
        return scenario_hash(self.raw)


def parse_axis(value: Any, name: str) -> tuple[float, ...]:
    if isinstance(value, str):
        parts = value.split(":")
        if len(parts) != 3:
            raise ScenarioError(f"range {value!r} is not of the form a:b:step", name)
        try:
            a, b, step = (float(p) for p in parts)
        except ValueError:
            raise ScenarioError(f"range {value!r} has a non-numeric bound", name) from None
        if step <= 0 or b < a:
            raise ScenarioError(f"range {value!r} needs step > 0 and b >= a", name)
        n = int(math.floor((b - a) / step + 1e-9))
        axis = tuple(round(a + k * step, 9) for k in range(n + 1))
    elif isinstance(value, (list, tuple)):
        try:
            axis = tuple(float(v) for v in value)
        except (TypeError, ValueError):
            raise ScenarioError("axis entries must be numbers", name) from None
    elif isinstance(value, (int, float)):
        axis = (float(value),)
    else:
        raise ScenarioError("expected an array or an 'a:b:step' string", name)
    if not axis:
        raise ScenarioError("axis is empty", name)
    return axis


def _parse_time(value: Any, name: str) -> datetime:
    if isinstance(value, datetime):
        dt = value
    elif isinstance(value, str):
        try:
            dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
        except ValueError:
            raise ScenarioError(f"cannot parse timestamp {value!r}", name) from None
    else:
        raise ScenarioError("expected an ISO-8601 timestamp", name)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _num(d: dict, key: str, section: str, default=None, kind=float):
    if key not in d:
        if default is None:
            raise ScenarioError("required field missing", f"{section}.{key}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"expected a number, got {v!r}", f"{section}.{key}")
    if kind is int:
        if int(v) != v:
            raise ScenarioError(f"expected an integer, got {v!r}", f"{section}.{key}")
        return int(v)
    return float(v)


def _check_keys(doc: dict) -> None:
    for key in doc:
        if key not in _TOP:
            raise ScenarioError("unknown top-level key", key)
    for section, allowed in _SECTIONS.items():
        sub = doc.get(section, {})
        if not isinstance(sub, dict):
            raise ScenarioError("expected a table", section)
        for key in sub:
            if key not in allowed:
                raise ScenarioError("unknown key", f"{section}.{key}")


def build_shell(d: dict) -> WalkerShell:
    try:
        pattern = WalkerPattern(str(d.get("pattern", "delta")).lower())
    except ValueError:
        raise ScenarioError("pattern must be 'delta' or 'star'", "shell.pattern") from None
    try:
        conv = PhasingConvention(d.get("phasing_convention", PhasingConvention.PAPER_PER_PLANE.value))
    except ValueError:
        raise ScenarioError(
            f"must be one of {[c.value for c in PhasingConvention]}", "shell.phasing_convention"
        ) from None
    epoch = _parse_time(d["epoch"], "shell.epoch") if "epoch" in d else DEFAULT_EPOCH
    try:
        return WalkerShell(
            pattern=pattern,
            inclination_deg=_num(d, "inclination_deg", "shell"),
            total_sats=_num(d, "total_sats", "shell", kind=int),
            planes=_num(d, "planes", "shell", kind=int),
            phasing=_num(d, "phasing", "shell", 0, kind=int),
            altitude_km=_num(d, "altitude_km", "shell"),
            epoch=epoch,
            raan0_deg=_num(d, "raan0_deg", "shell", 0.0),
            phasing_convention=conv,
        )
    except ScenarioError:
        raise
    except ConfigurationError as exc:
        raise ScenarioError(str(exc), "shell") from None


def scenario_from_dict(doc: dict, base_dir: Path | None = None) -> Scenario:
    doc = copy.deepcopy(doc)
    _check_keys(doc)
    mode = doc.get("mode")
    if mode not in MODES:
        raise ScenarioError(f"must be one of {list(MODES)}", "mode")
    if "shell" not in doc:
        raise ScenarioError("required section missing", "shell")
    shell = build_shell(doc["shell"])

    g = {**DEFAULT_GRID, **doc.get("grid", {})}
    if "duration_s" in doc.get("grid", {}):
        duration = _num(g, "duration_s", "grid")
    else:
        duration = _num(g, "days", "grid") * 86400.0
    start = _parse_time(g["start"], "grid.start") if "start" in g else shell.epoch
    try:
        grid = TimeGrid(start, duration, _num(g, "step_s", "grid"))
    except ConfigurationError as exc:
        raise ScenarioError(str(exc), "grid") from None
    j2 = g.get("j2", False)
    if not isinstance(j2, bool):
        raise ScenarioError("expected true or false", "grid.j2")

    mask = None
    if "mask" in doc:
        mask = _num(doc["mask"], "eps_deg", "mask")
        if not 0.0 <= mask <= 90.0:
            raise ScenarioError("elevation mask must lie in [0, 90]", "mask.eps_deg")

    out = doc.get("output", {})
    products = out.get("products", ["csv", "geojson"] if mode == "map" else ["csv"])
    if isinstance(products, str):
        products = [products]
    for p in products:
        if p not in PRODUCTS:
            raise ScenarioError(f"unknown product {p!r}; choose from {list(PRODUCTS)}", "output.products")
    out_dir = Path(out.get("dir", "leocov-out"))
    if base_dir is not None and not out_dir.is_absolute():
        out_dir = base_dir / out_dir
    workers = _num(out, "workers", "output", 1, kind=int)
    if workers < 1:
        raise ScenarioError("must be at least 1", "output.workers")

    kw: dict[str, Any] = dict(
        mode=mode, shell=shell, grid=grid, gmst0_deg=_num(g, "gmst0_deg", "grid", 0.0),
        j2_enabled=j2, mask_deg=mask, out_dir=out_dir, products=tuple(products),
        workers=workers, name=str(doc.get("name", "")), raw=doc,
    )

    if mode == "sweep":
        sw = doc.get("sweep")
        if not sw:
            raise ScenarioError("sweep mode needs a [sweep] section", "sweep")
        param = sw.get("param")
        if param not in ("elevation", "inclination"):
            raise ScenarioError("must be 'elevation' or 'inclination'", "sweep.param")
        if "values" not in sw:
            raise ScenarioError("required field missing", "sweep.values")
        values = parse_axis(sw["values"], "sweep.values")
        lo_bad = [v for v in values if not (0 <= v <= 90 if param == "elevation" else 0 <= v < 180)]
        if lo_bad:
            raise ScenarioError(f"out-of-range values {lo_bad}", "sweep.values")
        if param == "inclination" and mask is None:
            raise ScenarioError("an inclination sweep needs [mask] eps_deg", "mask.eps_deg")
        kw.update(
            sweep_param=param,
            sweep_values=values,
            lat_axis=_lat_axis(sw.get("lat", "55:90:1"), "sweep.lat"),
            lon_axis=parse_axis(sw.get("lons", list(SWEEP_LONGITUDES)), "sweep.lons"),
        )
    elif mode == "map":
        if mask is None:
            raise ScenarioError("map mode needs [mask] eps_deg", "mask.eps_deg")
        m = doc.get("map", {})
        try:
            region = Region(
                _num(m, "lat_min", "map", NORTH_ATLANTIC.lat_min),
                _num(m, "lat_max", "map", NORTH_ATLANTIC.lat_max),
                _num(m, "lon_min", "map", NORTH_ATLANTIC.lon_min),
                _num(m, "lon_max", "map", NORTH_ATLANTIC.lon_max),
            )
        except ConfigurationError as exc:
            raise ScenarioError(str(exc), "map") from None
        res = _num(m, "resolution", "map", 1.0)
        if res <= 0:
            raise ScenarioError("resolution must be positive", "map.resolution")
        kw.update(region=region, resolution=res)
    else:
        if mask is None:
            raise ScenarioError("single mode needs [mask] eps_deg", "mask.eps_deg")
        sites = doc.get("sites")
        if not sites:
            raise ScenarioError("single mode needs at least one [[sites]] entry", "sites")
        pts = []
        for k, s in enumerate(sites):
            try:
                pts.append(GeoPoint(_num(s, "lat", f"sites[{k}]"), _num(s, "lon", f"sites[{k}]"),
                                    _num(s, "alt", f"sites[{k}]", 0.0)))
            except DomainError as exc:
                raise ScenarioError(str(exc), f"sites[{k}]") from None
        kw.update(sites=tuple(pts))
    return Scenario(**kw)


def _lat_axis(value: Any, name: str) -> tuple[float, ...]:
    axis = parse_axis(value, name)
    bad = [v for v in axis if not -90.0 <= v <= 90.0]
    if bad:
        raise ScenarioError(f"latitudes outside [-90, 90]: {bad}", name)
    return axis


def parse_scenario_text(text: str, base_dir: Path | None = None) -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"parse error: {exc}") from None
    return scenario_from_dict(doc, base_dir)


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    return parse_scenario_text(path.read_text(), base_dir=None)


def _canonical(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _canonical(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_canonical(v) for v in obj]
    if isinstance(obj, datetime):
        return obj.isoformat()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def scenario_hash(doc: dict) -> str:
    """SHA-256 of the canonical JSON form of a scenario document, ignoring
    the output section (where results go does not change them)."""
    body = {k: v for k, v in doc.items() if k != "output"}
    payload = json.dumps(_canonical(body), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


def set_dotted(doc: dict, dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    cur = doc
    for p in parts[:-1]:
        cur = cur.setdefault(p, {})
        if not isinstance(cur, dict):
            raise ScenarioError("cannot set a key below a non-table value", dotted)
    cur[parts[-1]] = value


def parse_override(text: str) -> tuple[str, Any]:
    """``key.sub=value`` where value is read as a TOML value when possible."""
    if "=" not in text:
        raise ScenarioError(f"override {text!r} is not key=value")
    key, raw = text.split("=", 1)
    key = key.strip()
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key, value


def dumps_toml(doc: dict) -> str:
    """Serialise the subset of TOML used by scenario documents."""
    lines: list[str] = []
    scalars = {k: v for k, v in doc.items() if not isinstance(v, (dict, list)) or
               (isinstance(v, list) and not (v and isinstance(v[0], dict)))}
    for k, v in scalars.items():
        lines.append(f"{k} = {_toml_value(v)}")
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append("")
            lines.append(f"[{k}]")
            for kk, vv in v.items():
                lines.append(f"{kk} = {_toml_value(vv)}")
    for k, v in doc.items():
        if isinstance(v, list) and v and isinstance(v[0], dict):
            for item in v:
                lines.append("")
                lines.append(f"[[{k}]]")
                for kk, vv in item.items():
                    lines.append(f"{kk} = {_toml_value(vv)}")
    return "\n".join(lines) + "\n"


def _toml_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, datetime):
        return v.isoformat().replace("+00:00", "Z")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    return json.dumps(str(v))
