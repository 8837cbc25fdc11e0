"""Walker shell expansion and two-line element export."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .errors import ConfigurationError, ExportError
from .geo_core import CONSTANTS

DEFAULT_EPOCH = datetime(2025, 1, 1, tzinfo=timezone.utc)
FIRST_CATALOG_NUMBER = 90000


class WalkerPattern(str, enum.Enum):
    DELTA = "delta"
    STAR = "star"

    @property
    def raan_span_deg(self) -> float:
        return 360.0 if self is WalkerPattern.DELTA else 180.0


class PhasingConvention(str, enum.Enum):
    """How the phasing factor F offsets slots between adjacent planes.

    ``PAPER_PER_PLANE`` shifts each plane by ``F * span / P`` (span = RAAN
    spread of the pattern); ``CLASSIC_PER_SAT`` is the textbook Walker rule
    ``F * 360 / T``.
    """

    PAPER_PER_PLANE = "paper-per-plane"
    CLASSIC_PER_SAT = "classic-per-sat"


@dataclass(frozen=True)
class WalkerShell:
    pattern: WalkerPattern
    inclination_deg: float
    total_sats: int
    planes: int
    phasing: int
    altitude_km: float
    epoch: datetime = DEFAULT_EPOCH
    raan0_deg: float = 0.0
    phasing_convention: PhasingConvention = PhasingConvention.PAPER_PER_PLANE

    def __post_init__(self) -> None:
        for name, kind in (("pattern", WalkerPattern), ("phasing_convention", PhasingConvention)):
            try:
                object.__setattr__(self, name, kind(getattr(self, name)))
            except ValueError:
                choices = ", ".join(m.value for m in kind)
                raise ConfigurationError(
                    f"{name}={getattr(self, name)!r} is not one of {choices}"
                ) from None
        if not 0.0 <= self.inclination_deg < 180.0:
            raise ConfigurationError(
                f"inclination_deg={self.inclination_deg} violates 0 <= i < 180"
            )
        for name in ("total_sats", "planes", "phasing"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ConfigurationError(f"{name} must be an integer")
        if self.total_sats < 1 or self.planes < 1:
            raise ConfigurationError("total_sats and planes must be positive")
        if self.total_sats % self.planes:
            raise ConfigurationError(
                f"planes P={self.planes} must divide total_sats T={self.total_sats}"
            )
        if not 0 <= self.phasing < self.planes:
            raise ConfigurationError(
                f"phasing F={self.phasing} violates 0 <= F < P={self.planes}"
            )
        if not 0.0 < self.altitude_km <= 2000.0:
            raise ConfigurationError(
                f"altitude_km={self.altitude_km} violates 0 < h <= 2000"
            )
        if self.epoch.tzinfo is None:
            raise ConfigurationError("epoch must be timezone-aware (UTC)")

    @property
    def sats_per_plane(self) -> int:
        return self.total_sats // self.planes

    @property
    def semi_major_axis_km(self) -> float:
        return CONSTANTS.R_e + self.altitude_km

    @property
    def notation(self) -> str:
        return (
            f"{self.pattern.value} {self.inclination_deg:g}:"
            f"{self.total_sats}/{self.planes}/{self.phasing}"
        )

    def with_(self, **changes) -> "WalkerShell":
        from dataclasses import replace

        return replace(self, **changes)


@dataclass(frozen=True)
class SatelliteElement:
    sat_id: tuple[int, int]  # (plane_index, slot_index)
    raan_deg: float
    initial_arg_latitude_deg: float
    inclination_deg: float
    semi_major_axis_km: float
    mean_motion_rad_s: float = field(repr=False)

    @property
    def period_s(self) -> float:
        return 2.0 * math.pi / self.mean_motion_rad_s

    @property
    def label(self) -> str:
        return f"P{self.sat_id[0]:02d}S{self.sat_id[1]:02d}"


def plane_phase_shift_deg(shell: WalkerShell) -> float:
    """Argument-of-latitude offset between adjacent planes, in degrees."""
    if shell.phasing_convention is PhasingConvention.PAPER_PER_PLANE:
        return shell.phasing * shell.pattern.raan_span_deg / shell.planes
    return shell.phasing * 360.0 / shell.total_sats


def expand_shell(shell: WalkerShell) -> list[SatelliteElement]:
    """One element per satellite, plane-major then slot-minor."""
    a = shell.semi_major_axis_km
    n = math.sqrt(CONSTANTS.mu / a**3)
    s = shell.sats_per_plane
    raan_step = shell.pattern.raan_span_deg / shell.planes
    slot_step = 360.0 / s
    shift = plane_phase_shift_deg(shell)
    out = []
    for p in range(shell.planes):
        raan = (shell.raan0_deg + p * raan_step) % 360.0
        for k in range(s):
            u0 = (k * slot_step + p * shift) % 360.0
            out.append(
                SatelliteElement(
                    sat_id=(p, k),
                    raan_deg=raan,
                    initial_arg_latitude_deg=u0,
                    inclination_deg=shell.inclination_deg,
                    semi_major_axis_km=a,
                    mean_motion_rad_s=n,
                )
            )
    return out


# --- TLE -----------------------------------------------------------------


def tle_checksum(line: str) -> int:
    """Mod-10 sum over the first 68 columns; digits count at face value
    and each minus sign counts as one."""
    total = 0
    for ch in line[:68]:
        if ch.isdigit():
            total += int(ch)
        elif ch == "-":
            total += 1
    return total % 10


def _epoch_fields(epoch: datetime) -> tuple[int, float]:
    epoch = epoch.astimezone(timezone.utc)
    if not 1957 <= epoch.year <= 2056:
        raise ExportError(f"epoch year {epoch.year} not representable in a TLE (1957-2056)")
    start = datetime(epoch.year, 1, 1, tzinfo=timezone.utc)
    doy = 1.0 + (epoch - start).total_seconds() / 86400.0
    return epoch.year % 100, doy


def format_tle(
    element: SatelliteElement, catalog_number: int, epoch: datetime, element_set: int = 999
) -> tuple[str, str]:
    if not 0 < catalog_number <= 99999:
        raise ExportError(f"catalog number {catalog_number} does not fit 5 columns")
    yy, doy = _epoch_fields(epoch)
    epoch_str = f"{yy:02d}{doy:012.8f}"
    if len(epoch_str) != 14:
        raise ExportError(f"epoch {epoch} does not fit the TLE epoch field")
    body1 = (
        f"1 {catalog_number:05d}U {'':8s} {epoch_str} "
        f" .00000000  00000-0  00000-0 0 {element_set % 10000:4d}"
    )
    rev_per_day = element.mean_motion_rad_s * 86400.0 / (2.0 * math.pi)
    if rev_per_day >= 100.0:
        raise ExportError(f"mean motion {rev_per_day} rev/day does not fit the field")
    body2 = (
        f"2 {catalog_number:05d} {element.inclination_deg:8.4f} "
        f"{element.raan_deg % 360.0:8.4f} 0000000 {0.0:8.4f} "
        f"{element.initial_arg_latitude_deg % 360.0:8.4f} {rev_per_day:11.8f}{0:5d}"
    )
    # 360.0000 can appear after rounding a value just below 360
    body2 = body2.replace("360.0000", "  0.0000")
    return body1 + str(tle_checksum(body1)), body2 + str(tle_checksum(body2))


def tle_export(shell: WalkerShell) -> list[tuple[str, str]]:
    elements = expand_shell(shell)
    if FIRST_CATALOG_NUMBER + len(elements) - 1 > 99999:
        raise ExportError(f"{len(elements)} satellites exceed the analyst catalog range")
    return [
        format_tle(el, FIRST_CATALOG_NUMBER + idx, shell.epoch)
        for idx, el in enumerate(elements)
    ]


def write_tle_file(
    shell: WalkerShell, path: str | Path, with_names: bool = True, name_prefix: str = "WALKER"
) -> Path:
    path = Path(path)
    elements = expand_shell(shell)
    lines: list[str] = []
    for el, (l1, l2) in zip(elements, tle_export(shell)):
        if with_names:
            lines.append(f"{name_prefix}-{el.label}")
        lines.extend((l1, l2))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


@dataclass(frozen=True)
class TleElements:
    catalog_number: int
    epoch_year: int
    epoch_day: float
    inclination_deg: float
    raan_deg: float
    eccentricity: float
    arg_perigee_deg: float
    mean_anomaly_deg: float
    mean_motion_rev_day: float


def parse_tle(line1: str, line2: str) -> TleElements:
    """Read back the fields written by :func:`format_tle`.

    Only the circular, drag-free records this module emits are supported.
    """
    if not (line1.startswith("1 ") and line2.startswith("2 ")):
        raise ValueError("not a TLE line pair")
    yy = int(line1[18:20])
    return TleElements(
        catalog_number=int(line1[2:7]),
        epoch_year=(1900 + yy) if yy >= 57 else (2000 + yy),
        epoch_day=float(line1[20:32]),
        inclination_deg=float(line2[8:16]),
        raan_deg=float(line2[17:25]),
        eccentricity=float("0." + line2[26:33]),
        arg_perigee_deg=float(line2[34:42]),
        mean_anomaly_deg=float(line2[43:51]),
        mean_motion_rev_day=float(line2[52:63]),
    )


def read_tle_file(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    lines: Iterable[str] = [
        ln.rstrip("\n") for ln in Path(path).read_text().splitlines() if ln.strip()
    ]
    pending = None
    for ln in lines:
        if ln.startswith("1 ") and len(ln) == 69:
            pending = ln
        elif ln.startswith("2 ") and len(ln) == 69 and pending is not None:
            pairs.append((pending, ln))
            pending = None
    return pairs
