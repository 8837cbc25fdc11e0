"""Coverage probability, visible-count and revisit-time statistics.

Revisit events are maximal runs of samples with no visible satellite.
Runs that touch the first or last grid sample are truncated by the
observation window and are left out of the revisit distribution.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .constellation import WalkerShell, expand_shell
from .errors import ConfigurationError, DomainError
from .geo_core import GeoPoint
from .propagation import Ephemeris, TimeGrid, propagate
from .visibility import SiteProjection, VisibilityTimeline, visibility_timeline

SWEEP_LONGITUDES = tuple(float(x) for x in range(0, 360, 45))


@dataclass(frozen=True)
class RevisitEvent:
    t_loss: datetime
    t_recover: datetime
    tau_s: float


@dataclass(frozen=True, eq=False)
class CoverageStats:
    """Coverage figures for one site, or pooled over several sites.

    ``tau_s`` holds every interior gap duration in seconds (pooled across
    sites for aggregates); ``events`` is only filled for single-site stats
    built with ``keep_events=True``.
    """

    p_cover: float
    mean_visible: float
    tau_s: np.ndarray
    tau_median_s: float | None
    tau_max_s: float | None
    min_visible: int
    events: tuple[RevisitEvent, ...] | None = field(default=None, repr=False)

    @property
    def n_events(self) -> int:
        return int(self.tau_s.size)

    @property
    def revisit(self) -> tuple[RevisitEvent, ...]:
        if self.events is None:
            raise AttributeError("per-event timestamps were not retained")
        return self.events


def _require_non_empty(tl: VisibilityTimeline) -> None:
    if len(tl.n_visible) == 0:
        raise DomainError("empty visibility timeline")


def coverage_probability(tl: VisibilityTimeline) -> float:
    _require_non_empty(tl)
    return float(np.count_nonzero(tl.n_visible >= 1)) / len(tl.n_visible)


def mean_visible(tl: VisibilityTimeline) -> float:
    _require_non_empty(tl)
    return float(np.mean(tl.n_visible))


def gap_bounds(covered: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sample indices ``(loss, recover)`` of every interior coverage gap.

    ``loss`` is the first uncovered sample of a gap and ``recover`` the first
    covered sample after it.
    """
    c = np.asarray(covered, dtype=bool)
    if c.size < 3:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    step = np.diff(c.astype(np.int8))
    loss = np.flatnonzero(step == -1) + 1
    recover = np.flatnonzero(step == 1) + 1
    # a leading gap has a recovery without a preceding loss
    if not c[0]:
        recover = recover[1:]
    # a trailing gap has a loss without a following recovery
    if not c[-1]:
        loss = loss[:-1]
    return loss, recover


def revisit_times(tl: VisibilityTimeline) -> list[RevisitEvent]:
    _require_non_empty(tl)
    loss, recover = gap_bounds(tl.covered)
    step = tl.grid.step_s
    return [
        RevisitEvent(tl.grid.timestamp(int(i)), tl.grid.timestamp(int(j)), float((j - i) * step))
        for i, j in zip(loss, recover)
    ]


def lower_median(values: np.ndarray) -> float | None:
    """Order statistic at index ``(n - 1) // 2``; ``None`` when empty."""
    if len(values) == 0:
        return None
    ordered = np.sort(np.asarray(values, dtype=float))
    return float(ordered[(len(ordered) - 1) // 2])


def _tau_summary(tau: np.ndarray) -> tuple[float | None, float | None]:
    if tau.size == 0:
        return None, None
    return lower_median(tau), float(tau.max())


def coverage_stats(tl: VisibilityTimeline, keep_events: bool = False) -> CoverageStats:
    _require_non_empty(tl)
    loss, recover = gap_bounds(tl.covered)
    tau = (recover - loss).astype(float) * tl.grid.step_s
    med, mx = _tau_summary(tau)
    events = tuple(revisit_times(tl)) if keep_events else None
    return CoverageStats(
        p_cover=coverage_probability(tl),
        mean_visible=mean_visible(tl),
        tau_s=tau,
        tau_median_s=med,
        tau_max_s=mx,
        min_visible=int(tl.n_visible.min()),
        events=events,
    )


def aggregate_stats(stats: Sequence[CoverageStats]) -> CoverageStats:
    """Average p_cover and mean_visible; pool revisit gaps before the
    median and maximum are taken."""
    if not stats:
        raise DomainError("nothing to aggregate")
    tau = np.concatenate([s.tau_s for s in stats]) if stats else np.empty(0)
    med, mx = _tau_summary(tau)
    return CoverageStats(
        p_cover=float(np.mean([s.p_cover for s in stats])),
        mean_visible=float(np.mean([s.mean_visible for s in stats])),
        tau_s=tau,
        tau_median_s=med,
        tau_max_s=mx,
        min_visible=min(s.min_visible for s in stats),
    )


# --- sweeps and maps -------------------------------------------------------


def _map_ordered(fn: Callable, items: Sequence, workers: int | None) -> list:
    if workers is None or workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def site_stats_for_masks(
    eph: Ephemeris, site: GeoPoint, masks: Sequence[float]
) -> list[CoverageStats]:
    proj = SiteProjection(eph, site)
    return [coverage_stats(visibility_timeline(eph, site, m, projection=proj)) for m in masks]


@dataclass(frozen=True)
class SweepRow:
    param_name: str
    param_value: float
    lat_deg: float
    stats: CoverageStats


@dataclass(frozen=True)
class SweepTable:
    param_name: str
    param_values: tuple[float, ...]
    lat_axis: tuple[float, ...]
    lon_axis: tuple[float, ...]
    rows: tuple[SweepRow, ...]

    def get(self, param_value: float, lat_deg: float) -> CoverageStats:
        for r in self.rows:
            if r.param_value == param_value and r.lat_deg == lat_deg:
                return r.stats
        raise KeyError((param_value, lat_deg))

    def column(self, param_value: float) -> list[tuple[float, CoverageStats]]:
        return [(r.lat_deg, r.stats) for r in self.rows if r.param_value == param_value]

    def p_cover_matrix(self) -> np.ndarray:
        """p_cover with shape ``(len(param_values), len(lat_axis))``."""
        m = np.empty((len(self.param_values), len(self.lat_axis)))
        for r in self.rows:
            m[self.param_values.index(r.param_value), self.lat_axis.index(r.lat_deg)] = r.stats.p_cover
        return m


def _check_axis(name: str, axis: Sequence[float]) -> tuple[float, ...]:
    axis = tuple(float(v) for v in axis)
    if not axis:
        raise ConfigurationError(f"{name} axis is empty")
    return axis


def latitude_sweep(
    shell: WalkerShell,
    grid: TimeGrid,
    lat_axis: Sequence[float],
    *,
    param: str,
    values: Sequence[float],
    mask_deg: float | None = None,
    lon_axis: Sequence[float] = SWEEP_LONGITUDES,
    j2_enabled: bool = False,
    gmst0_deg: float = 0.0,
    workers: int | None = None,
) -> SweepTable:
    """Coverage versus latitude for a swept elevation mask or inclination.

    Each (value, latitude) entry pools the sites on ``lon_axis`` through
    :func:`aggregate_stats`. Sweeping ``"inclination"`` needs ``mask_deg``.
    """
    lat_axis = _check_axis("latitude", lat_axis)
    lon_axis = _check_axis("longitude", lon_axis)
    values = _check_axis(param, values)
    sites = [GeoPoint(lat, lon) for lat in lat_axis for lon in lon_axis]
    nlon = len(lon_axis)

    if param == "elevation":
        eph = propagate(expand_shell(shell), grid, j2_enabled, gmst0_deg, shell.epoch)
        per_site = _map_ordered(lambda s: site_stats_for_masks(eph, s, values), sites, workers)
        # per_site[site][value]
        table = {
            (v, lat): aggregate_stats([per_site[li * nlon + k][vi] for k in range(nlon)])
            for vi, v in enumerate(values)
            for li, lat in enumerate(lat_axis)
        }
    elif param == "inclination":
        if mask_deg is None:
            raise ConfigurationError("an inclination sweep needs a fixed elevation mask")
        table = {}
        for v in values:
            eph = propagate(
                expand_shell(shell.with_(inclination_deg=v)), grid, j2_enabled, gmst0_deg, shell.epoch
            )
            per_site = _map_ordered(
                lambda s: site_stats_for_masks(eph, s, [mask_deg])[0], sites, workers
            )
            for li, lat in enumerate(lat_axis):
                table[(v, lat)] = aggregate_stats(per_site[li * nlon:(li + 1) * nlon])
    else:
        raise ConfigurationError(f"unknown sweep parameter {param!r}")

    rows = tuple(
        SweepRow(param, v, lat, table[(v, lat)]) for v in values for lat in lat_axis
    )
    return SweepTable(param, values, lat_axis, lon_axis, rows)


@dataclass(frozen=True)
class Region:
    lat_min: float
    lat_max: float
    lon_min: float
    lon_max: float

    def __post_init__(self) -> None:
        if not -90.0 <= self.lat_min < self.lat_max <= 90.0:
            raise ConfigurationError("region needs -90 <= lat_min < lat_max <= 90")
        if not -180.0 <= self.lon_min < self.lon_max <= 180.0:
            raise ConfigurationError("region needs -180 <= lon_min < lon_max <= 180")


NORTH_ATLANTIC = Region(50.0, 90.0, -80.0, 40.0)


def cell_centers(lo: float, hi: float, resolution: float) -> tuple[float, ...]:
    n = int(math.floor((hi - lo) / resolution + 1e-9))
    if n < 1:
        raise ConfigurationError("region is smaller than one cell")
    return tuple(round(lo + (k + 0.5) * resolution, 10) for k in range(n))


@dataclass(frozen=True)
class CoverageGrid:
    lat_axis: tuple[float, ...]
    lon_axis: tuple[float, ...]
    resolution: float
    cells: dict[tuple[float, float], CoverageStats]

    def __post_init__(self) -> None:
        for axis in (self.lat_axis, self.lon_axis):
            if any(b <= a for a, b in zip(axis, axis[1:])):
                raise ConfigurationError("grid axes must be strictly increasing")
        if len(self.cells) != len(self.lat_axis) * len(self.lon_axis):
            raise ConfigurationError("every grid cell must be populated")

    def p_cover_matrix(self) -> np.ndarray:
        return np.array(
            [[self.cells[(la, lo)].p_cover for lo in self.lon_axis] for la in self.lat_axis]
        )

    def select(self, region: Region) -> list[tuple[tuple[float, float], CoverageStats]]:
        return [
            (k, v)
            for k, v in self.cells.items()
            if region.lat_min <= k[0] <= region.lat_max and region.lon_min <= k[1] <= region.lon_max
        ]


def coverage_map(
    shell: WalkerShell,
    mask_deg: float,
    grid: TimeGrid,
    region: Region = NORTH_ATLANTIC,
    resolution: float = 1.0,
    *,
    j2_enabled: bool = False,
    gmst0_deg: float = 0.0,
    workers: int | None = None,
    ephemeris: Ephemeris | None = None,
) -> CoverageGrid:
    """Per-cell coverage statistics evaluated at cell centres."""
    if not resolution > 0:
        raise ConfigurationError("resolution must be positive")
    lat_axis = cell_centers(region.lat_min, region.lat_max, resolution)
    lon_axis = cell_centers(region.lon_min, region.lon_max, resolution)
    eph = ephemeris or propagate(expand_shell(shell), grid, j2_enabled, gmst0_deg, shell.epoch)
    keys = [(la, lo) for la in lat_axis for lo in lon_axis]
    stats = _map_ordered(
        lambda k: site_stats_for_masks(eph, GeoPoint(k[0], k[1]), [mask_deg])[0], keys, workers
    )
    return CoverageGrid(lat_axis, lon_axis, resolution, dict(zip(keys, stats)))


# --- file outputs ---------------------------------------------------------


def _fmt(x: float | None, digits: int = 6) -> str:
    return "" if x is None else f"{x:.{digits}f}"


def write_sweep_csv(table: SweepTable, path: str | Path, header: Iterable[str] = ()) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["param_name", "param_value", "lat_deg", "p_cover", "mean_visible",
                    "tau_median_s", "tau_max_s", "n_events"])
        for r in table.rows:
            s = r.stats
            w.writerow([r.param_name, f"{r.param_value:g}", f"{r.lat_deg:g}", _fmt(s.p_cover),
                        _fmt(s.mean_visible), _fmt(s.tau_median_s, 1), _fmt(s.tau_max_s, 1),
                        s.n_events])
    return path


def write_map_csv(cg: CoverageGrid, path: str | Path, header: Iterable[str] = ()) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["lat", "lon", "p_cover", "tau_median_s", "tau_max_s"])
        for la in cg.lat_axis:
            for lo in cg.lon_axis:
                s = cg.cells[(la, lo)]
                w.writerow([f"{la:g}", f"{lo:g}", _fmt(s.p_cover), _fmt(s.tau_median_s, 1),
                            _fmt(s.tau_max_s, 1)])
    return path


def map_geojson(cg: CoverageGrid, metadata: dict | None = None) -> dict:
    """FeatureCollection of square cell polygons in lon/lat order."""
    half = cg.resolution / 2.0
    features = []
    for la in cg.lat_axis:
        for lo in cg.lon_axis:
            s = cg.cells[(la, lo)]
            w, e = round(lo - half, 10), round(lo + half, 10)
            south, north = round(la - half, 10), round(la + half, 10)
            features.append({
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[w, south], [e, south], [e, north], [w, north], [w, south]]],
                },
                "properties": {
                    "lat": la,
                    "lon": lo,
                    "p_cover": round(s.p_cover, 6),
                    "tau_median_s": s.tau_median_s,
                    "tau_max_s": s.tau_max_s,
                },
            })
    out: dict = {"type": "FeatureCollection", "features": features}
    if metadata:
        out["metadata"] = metadata
    return out


def write_map_geojson(cg: CoverageGrid, path: str | Path, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(json.dumps(map_geojson(cg, metadata), indent=1, sort_keys=True) + "\n")
    return path
