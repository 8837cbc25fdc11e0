"""Elevation geometry and per-site visibility timelines."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError
from .geo_core import EcefVector, GeoPoint, geodetic_to_ecef
from .propagation import Ephemeris, TimeGrid


@dataclass(frozen=True)
class ElevationMask:
    eps_deg: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.eps_deg <= 90.0:
            raise DomainError(f"elevation mask {self.eps_deg} deg outside [0, 90]")


@dataclass(frozen=True, eq=False)
class VisibilityTimeline:
    site: GeoPoint
    mask: ElevationMask
    grid: TimeGrid
    n_visible: np.ndarray
    indicators: np.ndarray | None = None  # (n_sats, n_samples) bool

    def __post_init__(self) -> None:
        if len(self.n_visible) != self.grid.n_samples:
            raise ValueError("n_visible length does not match the grid")

    @property
    def covered(self) -> np.ndarray:
        return self.n_visible >= 1


def elevation_of(sat: EcefVector, site: EcefVector) -> float:
    """Elevation (deg) of ``sat`` above the local horizontal plane at
    ``site``; the horizontal plane is normal to the radial direction."""
    s = site.to_array()
    rs = float(np.linalg.norm(s))
    if rs == 0.0:
        raise DomainError("site at the Earth's centre has no local horizon")
    d = sat.to_array() - s
    dn = float(np.linalg.norm(d))
    if dn == 0.0:
        raise DomainError("satellite and site coincide")
    sin_el = float(np.dot(d, s)) / (rs * dn)
    return math.degrees(math.asin(min(1.0, max(-1.0, sin_el))))


def elevation_series(eph: Ephemeris, site: GeoPoint | EcefVector) -> np.ndarray:
    """Elevations (deg) of every satellite at every sample, shape
    ``(n_sats, n_samples)``."""
    s = _site_vector(site)
    rs2 = float(s @ s)
    rs = math.sqrt(rs2)
    ps = eph.xyz @ s
    # |p - s|^2 expanded so only one pass over the positions is needed
    d2 = eph.squared_radius - 2.0 * ps + rs2
    with np.errstate(divide="ignore", invalid="ignore"):
        sin_el = (ps - rs2) / (rs * np.sqrt(d2))
    if np.any(d2 <= 0.0):
        raise DomainError("a satellite coincides with the site")
    np.clip(sin_el, -1.0, 1.0, out=sin_el)
    return np.degrees(np.arcsin(sin_el))


def _site_vector(site: GeoPoint | EcefVector) -> np.ndarray:
    if isinstance(site, GeoPoint):
        site = geodetic_to_ecef(site)
    v = site.to_array()
    if not np.linalg.norm(v) > 0:
        raise DomainError("site at the Earth's centre has no local horizon")
    return v


def _exact_visible(eph: Ephemeris, s: np.ndarray, eps: float, rows, cols) -> np.ndarray:
    p = eph.xyz[rows, cols]
    d = p - s
    sin_el = (d @ s) / (np.linalg.norm(s) * np.linalg.norm(d, axis=-1))
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0))) >= eps


class SiteProjection:
    """Projections of every ephemeris sample onto one site vector.

    For circular ephemerides, elevation is a strictly decreasing function of
    the Earth central angle, so ``elevation >= eps`` is the same test as
    ``p . s >= q_k(eps)`` with a per-satellite threshold ``q_k``. Samples
    within 1e-9 (relative) of the threshold are settled with the exact
    elevation formula, which keeps the inclusive boundary rule intact.
    """

    def __init__(self, eph: Ephemeris, site: GeoPoint | EcefVector):
        self.eph = eph
        self.s = _site_vector(site)
        self.rs = float(np.linalg.norm(self.s))
        self.radius = eph.circular_radius
        if self.radius is not None and np.any(self.radius <= self.rs):
            self.radius = None
        self.ps = eph.xyz @ self.s if self.radius is not None else None
        self._elev: np.ndarray | None = None

    def indicators(self, eps_deg: float) -> np.ndarray:
        if self.radius is None:
            if self._elev is None:
                self._elev = elevation_series(self.eph, self.s_vec)
            return self._elev >= eps_deg
        e = math.radians(eps_deg)
        a = self.radius
        gamma = np.arccos(np.clip(self.rs * math.cos(e) / a, -1.0, 1.0)) - e
        q = (a * self.rs * np.cos(gamma))[:, None]
        tol = (1e-9 * a * self.rs)[:, None]
        margin = self.ps - q
        vis = margin >= tol
        band = (margin > -tol) ^ vis
        if band.any():
            rows, cols = np.nonzero(band)
            vis[rows, cols] = _exact_visible(self.eph, self.s, eps_deg, rows, cols)
        return vis

    @property
    def s_vec(self) -> EcefVector:
        return EcefVector.from_array(self.s)


def visibility_timeline(
    eph: Ephemeris,
    site: GeoPoint,
    mask: ElevationMask | float,
    keep_indicators: bool = False,
    projection: SiteProjection | None = None,
) -> VisibilityTimeline:
    """Visible-satellite count per sample; elevation equal to the mask
    counts as visible.

    Pass a :class:`SiteProjection` to evaluate one site against several
    masks without recomputing the geometry.
    """
    if not isinstance(mask, ElevationMask):
        mask = ElevationMask(float(mask))
    proj = projection or SiteProjection(eph, site)
    vis = proj.indicators(mask.eps_deg)
    n_visible = np.count_nonzero(vis, axis=0).astype(np.int64)
    return VisibilityTimeline(
        site=site,
        mask=mask,
        grid=eph.grid,
        n_visible=n_visible,
        indicators=vis if keep_indicators else None,
    )


def timelines_for_masks(
    eph: Ephemeris, site: GeoPoint, masks: Sequence[float]
) -> list[VisibilityTimeline]:
    proj = SiteProjection(eph, site)
    return [visibility_timeline(eph, site, m, projection=proj) for m in masks]


def write_timeline_csv(tl: VisibilityTimeline, path: str | Path, header: Sequence[str] = ()) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["t_offset_s", "n_visible"])
        for t, n in zip(tl.grid.offsets(), tl.n_visible):
            w.writerow([f"{t:.3f}", int(n)])
    return path
