"""Constants, spherical-Earth frames and footprint geometry.

Everything here assumes a spherical Earth of radius ``R_e = 6378 km``.
Angles cross the public boundary in degrees and are converted to radians
internally.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Constants:
    R_e: float = 6378.0  # km
    mu: float = 398600.4418  # km^3/s^2
    omega_e: float = 7.2921159e-5  # rad/s
    c: float = 299792.458  # km/s
    A_e: float = 510_072_000.0  # km^2
    J2: float = 1.08263e-3

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


CONSTANTS = Constants()
R_E = CONSTANTS.R_e


@dataclass(frozen=True)
class GeoPoint:
    """Geocentric site on the spherical Earth.

    Longitude is wrapped into [-180, 180) on construction; latitude outside
    [-90, 90] or a negative altitude raises :class:`DomainError`.
    """

    lat: float
    lon: float
    alt: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.lat) or not -90.0 <= self.lat <= 90.0:
            raise DomainError(f"latitude {self.lat} outside [-90, 90]")
        if not math.isfinite(self.lon):
            raise DomainError(f"longitude {self.lon} is not finite")
        if not math.isfinite(self.alt) or self.alt < 0.0:
            raise DomainError(f"altitude {self.alt} km must be >= 0")
        object.__setattr__(self, "lon", _wrap_lon(self.lon))


def _wrap_lon(lon: float) -> float:
    wrapped = (lon + 180.0) % 360.0 - 180.0
    # (x % 360) can round up to exactly 360 for tiny negative inputs
    return -180.0 if wrapped >= 180.0 else wrapped


@dataclass(frozen=True)
class EcefVector:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DomainError("ECEF components must be finite")

    @classmethod
    def from_array(cls, arr) -> "EcefVector":
        x, y, z = (float(v) for v in arr)
        return cls(x, y, z)

    def to_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)


@dataclass(frozen=True)
class FootprintSolution:
    """Angles of the Earth-centre / satellite / edge-user triangle.

    ``alpha`` is the angle at the user, ``beta`` at the satellite (nadir
    half-angle) and ``gamma`` the Earth central angle; all in radians.
    """

    alpha: float
    beta: float
    gamma: float
    radius: float


def _check_h_eps(h: float, eps: float) -> None:
    if not h > 0.0:
        raise DomainError(f"altitude must be positive, got {h}")
    if not 0.0 <= eps <= 90.0:
        raise DomainError(f"elevation {eps} deg outside [0, 90]")


def geodetic_to_ecef(p: GeoPoint, R_e: float = R_E) -> EcefVector:
    r = R_e + p.alt
    lat, lon = math.radians(p.lat), math.radians(p.lon)
    return EcefVector(
        r * math.cos(lat) * math.cos(lon),
        r * math.cos(lat) * math.sin(lon),
        r * math.sin(lat),
    )


def ecef_to_latlon(v: EcefVector) -> tuple[float, float]:
    """Geocentric latitude and longitude (degrees) of an ECEF vector."""
    lat = math.degrees(math.atan2(v.z, math.hypot(v.x, v.y)))
    lon = math.degrees(math.atan2(v.y, v.x))
    return lat, lon


def footprint_solution(h: float, eps: float, R_e: float = R_E) -> FootprintSolution:
    _check_h_eps(h, eps)
    e = math.radians(eps)
    alpha = math.pi / 2 + e
    # law of sines: (R_e + h)/sin(alpha) = R_e/sin(beta)
    beta = math.asin(R_e * math.sin(alpha) / (R_e + h))
    gamma = math.acos(R_e * math.cos(e) / (R_e + h)) - e
    return FootprintSolution(alpha, beta, gamma, gamma * R_e)


def footprint_radius(h: float, eps: float, R_e: float = R_E) -> float:
    """Ground radius (km) of the region that sees a satellite at altitude
    ``h`` above elevation ``eps``, measured along the surface."""
    _check_h_eps(h, eps)
    e = math.radians(eps)
    if eps == 90.0:
        return 0.0
    r = (math.acos(R_e * math.cos(e) / (R_e + h)) - e) * R_e
    return max(r, 0.0)


def slant_range(h: float, eps: float, R_e: float = R_E) -> float:
    """Distance (km) from a ground user to a satellite seen at ``eps``."""
    _check_h_eps(h, eps)
    if eps == 90.0:
        return float(h)
    e = math.radians(eps)
    a = R_e + h
    return math.sqrt(a * a - (R_e * math.cos(e)) ** 2) - R_e * math.sin(e)


def min_satellites_lower_bound(
    h: float, eps: float, R_e: float = R_E, A_e: float = CONSTANTS.A_e
) -> int:
    r = footprint_radius(h, eps, R_e)
    if r <= 0.0:
        raise DomainError(
            f"footprint radius is zero at eps={eps} deg; no finite satellite count covers the Earth"
        )
    return math.ceil(A_e / (math.pi * r * r))
