"""Circular two-body propagation into the Earth-fixed frame.

Each satellite moves on a circle of radius ``a`` at constant mean motion.
Optionally the node regresses at the secular J2 rate. The Earth-fixed
frame is the inertial frame rotated by ``omega_e * (t - t_ref)`` about the
polar axis, with ``t_ref`` the grid start and an adjustable Greenwich
angle at that instant.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Mapping
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .constellation import SatelliteElement
from .errors import ConfigurationError
from .geo_core import CONSTANTS, EcefVector


@dataclass(frozen=True)
class TimeGrid:
    start: datetime
    duration_s: float
    step_s: float

    def __post_init__(self) -> None:
        if not self.duration_s > 0 or not self.step_s > 0:
            raise ConfigurationError("duration_s and step_s must be positive")
        ratio = self.duration_s / self.step_s
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ConfigurationError(
                f"step_s={self.step_s} must divide duration_s={self.duration_s}"
            )
        if self.start.tzinfo is None:
            raise ConfigurationError("grid start must be timezone-aware (UTC)")

    @classmethod
    def days(cls, days: float, step_s: float, start: datetime | None = None) -> "TimeGrid":
        from .constellation import DEFAULT_EPOCH

        return cls(start or DEFAULT_EPOCH, days * 86400.0, step_s)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration_s / self.step_s)) + 1

    def offsets(self) -> np.ndarray:
        """Sample offsets from ``start`` in seconds."""
        return np.arange(self.n_samples, dtype=float) * self.step_s

    def timestamp(self, index: int) -> datetime:
        return self.start + timedelta(seconds=index * self.step_s)


class Ephemeris(Mapping):
    """Earth-fixed positions of every satellite on a shared grid.

    Behaves as a read-only mapping ``sat_id -> (n_samples, 3)`` array. The
    packed ``xyz`` array has shape ``(n_sats, n_samples, 3)`` in km.
    """

    def __init__(self, grid: TimeGrid, sat_ids: Sequence[tuple[int, int]], xyz: np.ndarray):
        xyz = np.asarray(xyz, dtype=float)
        if xyz.ndim != 3 or xyz.shape[2] != 3:
            raise ValueError("xyz must have shape (n_sats, n_samples, 3)")
        if xyz.shape[0] != len(sat_ids) or xyz.shape[1] != grid.n_samples:
            raise ValueError("xyz shape does not match sat_ids and grid")
        self.grid = grid
        self.sat_ids = [tuple(s) for s in sat_ids]
        self.xyz = xyz
        self.xyz.setflags(write=False)
        self._index = {sid: k for k, sid in enumerate(self.sat_ids)}
        self._r2: np.ndarray | None = None
        self._radius: np.ndarray | None | bool = False

    def __getitem__(self, sat_id) -> np.ndarray:
        return self.xyz[self._index[tuple(sat_id)]]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.sat_ids)

    def __len__(self) -> int:
        return len(self.sat_ids)

    @property
    def n_sats(self) -> int:
        return self.xyz.shape[0]

    @property
    def squared_radius(self) -> np.ndarray:
        """Cached ``|pos|^2`` per satellite and sample."""
        if self._r2 is None:
            r2 = np.einsum("kti,kti->kt", self.xyz, self.xyz)
            r2.setflags(write=False)
            self._r2 = r2
        return self._r2

    @property
    def circular_radius(self) -> np.ndarray | None:
        """Per-satellite orbit radius when every satellite keeps a constant
        distance from the Earth's centre (relative spread below 1e-12),
        else ``None``."""
        if self._radius is False:
            r2 = self.squared_radius
            lo, hi = r2.min(axis=1), r2.max(axis=1)
            if np.all(hi - lo <= 2e-12 * hi):
                self._radius = np.sqrt(0.5 * (lo + hi))
            else:
                self._radius = None
        return self._radius

    def position(self, sat_id, index: int) -> EcefVector:
        return EcefVector.from_array(self[sat_id][index])

    def subset(self, sat_ids: Sequence[tuple[int, int]]) -> "Ephemeris":
        idx = [self._index[tuple(s)] for s in sat_ids]
        return Ephemeris(self.grid, [self.sat_ids[k] for k in idx], self.xyz[idx].copy())


def j2_raan_rate(a_km: float, inclination_deg: float, n_rad_s: float) -> float:
    """Secular nodal regression rate (rad/s) of a circular orbit."""
    return (
        -1.5 * n_rad_s * CONSTANTS.J2 * (CONSTANTS.R_e / a_km) ** 2
        * math.cos(math.radians(inclination_deg))
    )


def inertial_positions(
    elements: Sequence[SatelliteElement], t: np.ndarray, j2_enabled: bool = False
) -> np.ndarray:
    """Inertial positions, shape ``(n_sats, len(t), 3)``, with t in seconds
    since the element epoch."""
    t = np.asarray(t, dtype=float)
    inc = np.radians([e.inclination_deg for e in elements])[:, None]
    raan0 = np.radians([e.raan_deg for e in elements])[:, None]
    u0 = np.radians([e.initial_arg_latitude_deg for e in elements])[:, None]
    n = np.array([e.mean_motion_rad_s for e in elements])[:, None]
    a = np.array([e.semi_major_axis_km for e in elements])[:, None]

    u = np.mod(u0 + n * t[None, :], 2.0 * np.pi)
    raan = raan0
    if j2_enabled:
        rates = np.array(
            [j2_raan_rate(e.semi_major_axis_km, e.inclination_deg, e.mean_motion_rad_s)
             for e in elements]
        )[:, None]
        raan = raan0 + rates * t[None, :]
    cu, su = np.cos(u), np.sin(u)
    co, so = np.cos(raan), np.sin(raan)
    ci, si = np.cos(inc), np.sin(inc)
    out = np.empty(u.shape + (3,))
    out[..., 0] = a * (cu * co - su * ci * so)
    out[..., 1] = a * (cu * so + su * ci * co)
    out[..., 2] = a * (su * si)
    return out


def propagate(
    elements: Sequence[SatelliteElement],
    grid: TimeGrid,
    j2_enabled: bool = False,
    gmst0_deg: float = 0.0,
    element_epoch: datetime | None = None,
) -> Ephemeris:
    """Earth-fixed ephemeris of ``elements`` sampled on ``grid``.

    ``element_epoch`` is the instant at which the elements' RAAN and
    argument of latitude hold; it defaults to the grid start. ``gmst0_deg``
    is the angle between the inertial x-axis and the Greenwich meridian at
    the grid start.
    """
    if len(elements) == 0:
        raise ConfigurationError("cannot propagate an empty element list")
    offsets = grid.offsets()
    lead = 0.0
    if element_epoch is not None:
        lead = (grid.start - element_epoch.astimezone(timezone.utc)).total_seconds()
    eci = inertial_positions(elements, offsets + lead, j2_enabled)

    theta = math.radians(gmst0_deg) + CONSTANTS.omega_e * offsets
    c, s = np.cos(theta), np.sin(theta)
    ecef = np.empty_like(eci)
    ecef[..., 0] = c * eci[..., 0] + s * eci[..., 1]
    ecef[..., 1] = -s * eci[..., 0] + c * eci[..., 1]
    ecef[..., 2] = eci[..., 2]
    return Ephemeris(grid, [e.sat_id for e in elements], ecef)


def write_ephemeris_csv(eph: Ephemeris, path: str | Path, header: Sequence[str] = ()) -> Path:
    path = Path(path)
    offsets = eph.grid.offsets()
    with path.open("w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["sat_id", "t_offset_s", "x_km", "y_km", "z_km"])
        for sid in eph.sat_ids:
            label = f"{sid[0]}-{sid[1]}"
            for t, (x, y, z) in zip(offsets, eph[sid]):
                w.writerow([label, f"{t:.3f}", f"{x:.6f}", f"{y:.6f}", f"{z:.6f}"])
    return path
