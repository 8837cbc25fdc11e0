"""Independent reference implementations used as test oracles."""
import math

import numpy as np

from leocov.geo_core import R_E


def elevation_at_central_angle(h: float, gamma: float) -> float:
    """Elevation (deg) of a satellite at altitude h seen from a site whose
    great-circle distance to the sub-satellite point is gamma (rad).

    Plain planar geometry, kept independent of the library code.
    """
    site = np.array([R_E, 0.0])
    sat = (R_E + h) * np.array([math.cos(gamma), math.sin(gamma)])
    d = sat - site
    return math.degrees(math.atan2(d[0], d[1]))


def bisect_footprint(h: float, eps: float, tol: float = 1e-13) -> float:
    """Ground radius (km) at which the satellite sits exactly at ``eps``."""
    lo, hi = 0.0, math.acos(R_E / (R_E + h)) + 1e-9
    if eps >= 90.0:
        return 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if elevation_at_central_angle(h, mid) > eps:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return R_E * 0.5 * (lo + hi)


def _checksum(body: str) -> int:
    return sum(int(c) if c.isdigit() else (c == "-") for c in body) % 10


_L1_SPACES = (2, 9, 18, 33, 44, 53, 62, 64)
_L2_SPACES = (2, 8, 17, 26, 34, 43, 52)
_L1_FIELDS = {(3, 7): "int", (19, 20): "int", (21, 32): "float", (65, 68): "int"}
_L2_FIELDS = {(3, 7): "int", (9, 16): "float", (18, 25): "float", (27, 33): "int",
              (35, 42): "float", (44, 51): "float", (53, 63): "float", (64, 68): "int"}


def tle_line_problems(line: str, number: int) -> list[str]:
    """Column-layout and checksum problems of one TLE line (1-based columns)."""
    probs = []
    if len(line) != 69:
        return [f"length {len(line)}"]
    if line[0] != str(number):
        probs.append("line number")
    col = lambda a, b: line[a - 1:b]  # noqa: E731
    for c in _L1_SPACES if number == 1 else _L2_SPACES:
        if line[c - 1] != " ":
            probs.append(f"column {c} not blank")
    for (a, b), kind in (_L1_FIELDS if number == 1 else _L2_FIELDS).items():
        text = col(a, b).strip()
        try:
            (int if kind == "int" else float)(text)
        except ValueError:
            probs.append(f"columns {a}-{b} {text!r} not {kind}")
    if number == 2:
        for a, b, hi in ((9, 16, 180.0), (18, 25, 360.0), (35, 42, 360.0), (44, 51, 360.0)):
            v = float(col(a, b))
            if not 0.0 <= v < hi + (hi == 180.0):
                probs.append(f"angle {v} out of range in {a}-{b}")
    if not line[68].isdigit() or int(line[68]) != _checksum(line[:68]):
        probs.append("checksum")
    return probs


def tle_pair_problems(l1: str, l2: str) -> list[str]:
    probs = tle_line_problems(l1, 1) + tle_line_problems(l2, 2)
    if not probs and l1[2:7] != l2[2:7]:
        probs.append("catalog numbers differ")
    return probs
