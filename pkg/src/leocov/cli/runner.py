"""Execute a validated :class:`Scenario` and write its products."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path

from .. import __version__
from ..constellation import expand_shell, write_tle_file
from ..geo_core import CONSTANTS
from ..metrics import (
    coverage_map,
    coverage_stats,
    latitude_sweep,
    write_map_csv,
    write_map_geojson,
    write_sweep_csv,
)
from ..propagation import propagate, write_ephemeris_csv
from ..visibility import timelines_for_masks, write_timeline_csv
from .scenario import Scenario

log = logging.getLogger(__name__)

CONVENTIONS = {
    "visibility": "elevation >= mask counts as visible (spherical Earth, radial up-vector)",
    "revisit": "gaps touching the first or last sample are excluded; median is the lower median",
    "propagation": "circular two-body, Earth rotation about z, Greenwich angle gmst0 at grid start",
}


def header_lines(sc: Scenario) -> list[str]:
    c = CONSTANTS
    return [
        f"leocov {__version__}",
        f"constants: R_e={c.R_e} km mu={c.mu} km3/s2 omega_e={c.omega_e} rad/s "
        f"c={c.c} km/s A_e={c.A_e:.0f} km2 J2={c.J2}",
        f"shell: {sc.shell.notation} h={sc.shell.altitude_km:g} km raan0={sc.shell.raan0_deg:g} deg "
        f"epoch={sc.shell.epoch.isoformat()}",
        f"phasing_convention: {sc.shell.phasing_convention.value}",
        f"grid: start={sc.grid.start.isoformat()} duration_s={sc.grid.duration_s:g} "
        f"step_s={sc.grid.step_s:g} gmst0_deg={sc.gmst0_deg:g} j2={str(sc.j2_enabled).lower()}",
        f"conventions: {CONVENTIONS['visibility']}; {CONVENTIONS['revisit']}",
        f"scenario_sha256: {sc.digest}",
    ]


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(sc: Scenario, source_text: str | None = None) -> list[Path]:
    """Run ``sc``; returns the written files, manifest last."""
    out = sc.out_dir
    out.mkdir(parents=True, exist_ok=True)
    header = header_lines(sc)
    written: list[Path] = []
    log.info("running %s scenario %s", sc.mode, sc.digest[:12])

    if "tle" in sc.products:
        written.append(write_tle_file(sc.shell, out / "constellation.tle"))

    eph = None
    if sc.mode in ("single", "map") or "ephemeris" in sc.products:
        eph = propagate(expand_shell(sc.shell), sc.grid, sc.j2_enabled, sc.gmst0_deg, sc.shell.epoch)
    if "ephemeris" in sc.products:
        written.append(write_ephemeris_csv(eph, out / "ephemeris.csv", header))

    if sc.mode == "sweep":
        table = latitude_sweep(
            sc.shell, sc.grid, sc.lat_axis, param=sc.sweep_param, values=sc.sweep_values,
            mask_deg=sc.mask_deg, lon_axis=sc.lon_axis, j2_enabled=sc.j2_enabled,
            gmst0_deg=sc.gmst0_deg, workers=sc.workers,
        )
        if "csv" in sc.products:
            written.append(write_sweep_csv(table, out / "sweep.csv", header))
    elif sc.mode == "map":
        cg = coverage_map(
            sc.shell, sc.mask_deg, sc.grid, sc.region, sc.resolution,
            workers=sc.workers, ephemeris=eph,
        )
        if "csv" in sc.products:
            written.append(write_map_csv(cg, out / "map.csv", header))
        if "geojson" in sc.products:
            meta = {"generator": header[0], "header": header[1:]}
            written.append(write_map_geojson(cg, out / "map.geojson", meta))
    else:
        rows = []
        for k, site in enumerate(sc.sites):
            tl = timelines_for_masks(eph, site, [sc.mask_deg])[0]
            st = coverage_stats(tl)
            rows.append((site, st))
            if "timeline" in sc.products:
                written.append(write_timeline_csv(tl, out / f"timeline_site{k:03d}.csv", header))
        if "csv" in sc.products:
            written.append(_write_sites_csv(rows, out / "sites.csv", header))

    manifest = out / "manifest.json"
    doc = {
        "tool": "leocov",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "scenario_sha256": sc.digest,
        "input_sha256": hashlib.sha256(source_text.encode()).hexdigest() if source_text else None,
        "mode": sc.mode,
        "name": sc.name,
        "constants": CONSTANTS.as_dict(),
        "conventions": {**CONVENTIONS, "phasing": sc.shell.phasing_convention.value},
        "shell": sc.shell.notation,
        "outputs": {p.name: _sha256(p) for p in written},
    }
    manifest.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    written.append(manifest)
    return written


def _write_sites_csv(rows, path: Path, header: list[str]) -> Path:
    with path.open("w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["lat", "lon", "alt_km", "p_cover", "mean_visible", "tau_median_s",
                    "tau_max_s", "n_events"])
        for site, st in rows:
            w.writerow([f"{site.lat:g}", f"{site.lon:g}", f"{site.alt:g}", f"{st.p_cover:.6f}",
                        f"{st.mean_visible:.6f}",
                        "" if st.tau_median_s is None else f"{st.tau_median_s:.1f}",
                        "" if st.tau_max_s is None else f"{st.tau_max_s:.1f}", st.n_events])
    return path
