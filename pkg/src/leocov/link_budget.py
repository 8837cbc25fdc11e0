"""Free-space path loss, tabulated atmospheric excess and LoS probability.

Atmospheric excess attenuation is a lookup in an
:class:`AttenuationTable`, interpolated bilinearly in
``(log10 frequency, elevation)`` with no extrapolation. The bundled table
is anchored on a North-European annual-statistics example at 2, 10, 28
and 50 GHz; supply your own CSV for other sites.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, OutOfTableError
from .geo_core import CONSTANTS, slant_range


@dataclass(frozen=True)
class LinkBudgetInputs:
    frequency_hz: float
    altitude_km: float
    elevation_deg: float

    def __post_init__(self) -> None:
        if not 1e8 < self.frequency_hz < 1e11:
            raise DomainError(f"frequency {self.frequency_hz} Hz outside (1e8, 1e11)")
        if not self.altitude_km > 0:
            raise DomainError("altitude must be positive")
        if not 0.0 <= self.elevation_deg <= 90.0:
            raise DomainError(f"elevation {self.elevation_deg} outside [0, 90]")


@dataclass(frozen=True)
class LinkBudgetResult:
    slant_range_km: float
    fspl_db: float
    atmos_excess_db: float
    total_db: float


@dataclass(frozen=True, eq=False)
class AttenuationTable:
    freq_axis_hz: np.ndarray
    elev_axis_deg: np.ndarray
    excess_db: np.ndarray  # (n_freq, n_elev)
    source: str = ""

    def __post_init__(self) -> None:
        f = np.asarray(self.freq_axis_hz, dtype=float)
        e = np.asarray(self.elev_axis_deg, dtype=float)
        v = np.asarray(self.excess_db, dtype=float)
        if f.ndim != 1 or e.ndim != 1 or v.shape != (f.size, e.size):
            raise ValueError("table shape must be (len(freq_axis), len(elev_axis))")
        if f.size < 2 or e.size < 2:
            raise ValueError("table needs at least two nodes on each axis")
        if np.any(np.diff(f) <= 0) or np.any(np.diff(e) <= 0) or f[0] <= 0:
            raise ValueError("table axes must be positive and strictly increasing")
        if np.any(v < 0):
            raise ValueError("attenuation entries must be non-negative")
        if np.any(np.diff(v, axis=1) > 0):
            raise ValueError("attenuation must not increase with elevation")
        for name, arr in (("freq_axis_hz", f), ("elev_axis_deg", e), ("excess_db", v)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


class Environment(str, enum.Enum):
    DENSE_URBAN = "dense-urban"
    URBAN = "urban"
    SUBURBAN_RURAL = "suburban-rural"


@dataclass(frozen=True, eq=False)
class LosTable:
    """Per-environment LoS nodes; each environment keeps its own elevation axis."""

    nodes: dict[Environment, tuple[np.ndarray, np.ndarray]]
    source: str = ""

    def __post_init__(self) -> None:
        clean = {}
        for env, (e, p) in self.nodes.items():
            env = Environment(env)
            e = np.array(e, dtype=float)
            p = np.array(p, dtype=float)
            if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
                raise ValueError(f"{env.value}: elevation nodes must be strictly increasing")
            if p.shape != e.shape:
                raise ValueError(f"{env.value}: expected {e.size} values")
            if np.any(p < 0) or np.any(p > 1):
                raise ValueError(f"{env.value}: probabilities must lie in [0, 1]")
            if np.any(np.diff(p) < 0):
                raise ValueError(f"{env.value}: LoS probability must not decrease with elevation")
            e.setflags(write=False)
            p.setflags(write=False)
            clean[env] = (e, p)
        if not clean:
            raise ValueError("empty LoS table")
        object.__setattr__(self, "nodes", clean)

    @property
    def environments(self) -> list[Environment]:
        return list(self.nodes)


# --- free space -----------------------------------------------------------


def fspl(frequency_hz: float, distance_km: float) -> float:
    """Friis free-space loss in dB."""
    if not frequency_hz > 0 or not distance_km > 0:
        raise DomainError("frequency and distance must be positive")
    return 20.0 * math.log10(4.0 * math.pi * distance_km * frequency_hz / CONSTANTS.c)


# --- interpolation ----------------------------------------------------------


def _bracket(axis: np.ndarray, x: float) -> tuple[int, float]:
    """Cell index ``k`` and weight ``t`` with ``x = axis[k] + t*(axis[k+1]-axis[k])``."""
    if not axis[0] <= x <= axis[-1]:
        raise OutOfTableError(f"{x} outside [{axis[0]}, {axis[-1]}]")
    k = int(np.searchsorted(axis, x, side="right")) - 1
    k = min(max(k, 0), axis.size - 2)
    return k, (x - axis[k]) / (axis[k + 1] - axis[k])


def atmospheric_excess(frequency_hz: float, eps_deg: float, table: AttenuationTable | None = None) -> float:
    table = table or default_attenuation_table()
    logf = np.log10(table.freq_axis_hz)
    try:
        i, u = _bracket(logf, math.log10(frequency_hz))
    except OutOfTableError:
        raise OutOfTableError(
            f"frequency {frequency_hz:g} Hz outside table range "
            f"[{table.freq_axis_hz[0]:g}, {table.freq_axis_hz[-1]:g}]"
        ) from None
    try:
        j, w = _bracket(table.elev_axis_deg, float(eps_deg))
    except OutOfTableError:
        raise OutOfTableError(
            f"elevation {eps_deg} deg outside table range "
            f"[{table.elev_axis_deg[0]:g}, {table.elev_axis_deg[-1]:g}]"
        ) from None
    v = table.excess_db
    # an exact node hit must return the stored value untouched
    if u == 0.0 and w == 0.0:
        return float(v[i, j])
    lo = (1.0 - w) * v[i, j] + w * v[i, j + 1]
    hi = (1.0 - w) * v[i + 1, j] + w * v[i + 1, j + 1]
    if u == 0.0:
        return float(lo)
    if u == 1.0:
        return float(hi)
    return float((1.0 - u) * lo + u * hi)


def total_path_loss(inputs: LinkBudgetInputs, table: AttenuationTable | None = None) -> LinkBudgetResult:
    d = slant_range(inputs.altitude_km, inputs.elevation_deg)
    free = fspl(inputs.frequency_hz, d)
    excess = atmospheric_excess(inputs.frequency_hz, inputs.elevation_deg, table)
    return LinkBudgetResult(d, free, excess, free + excess)


def los_probability(env: Environment | str, eps_deg: float, table: LosTable | None = None) -> float:
    table = table or default_los_table()
    env = Environment(env)
    if env not in table.nodes:
        raise DomainError(f"environment {env.value} not in LoS table")
    axis, p = table.nodes[env]
    try:
        k, t = _bracket(axis, float(eps_deg))
    except OutOfTableError:
        raise OutOfTableError(
            f"elevation {eps_deg} outside [{axis[0]:g}, {axis[-1]:g}]"
        ) from None
    if t == 0.0:
        return float(p[k])
    if t == 1.0:
        return float(p[k + 1])
    return float((1.0 - t) * p[k] + t * p[k + 1])


# --- table files ------------------------------------------------------------


def _data_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def parse_attenuation_csv(text: str, source: str = "") -> AttenuationTable:
    """Header row: a label cell then elevations (deg); each following row:
    frequency (Hz) then excess attenuation (dB)."""
    rows = list(csv.reader(io.StringIO("\n".join(_data_lines(text)))))
    if len(rows) < 3:
        raise ValueError("attenuation table needs a header and at least two rows")
    elev = [float(x) for x in rows[0][1:]]
    freq, vals = [], []
    for r in rows[1:]:
        if len(r) != len(elev) + 1:
            raise ValueError(f"row {r[0]!r} has {len(r) - 1} values, expected {len(elev)}")
        freq.append(float(r[0]))
        vals.append([float(x) for x in r[1:]])
    return AttenuationTable(np.array(freq), np.array(elev), np.array(vals), source)


def format_attenuation_csv(table: AttenuationTable, comments: Iterable[str] = ()) -> str:
    out = io.StringIO()
    for c in comments:
        out.write(f"# {c}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["freq_hz"] + [f"{e:g}" for e in table.elev_axis_deg])
    for f, row in zip(table.freq_axis_hz, table.excess_db):
        w.writerow([f"{f:.6g}"] + [f"{v:.4f}".rstrip("0").rstrip(".") for v in row])
    return out.getvalue()


def parse_los_csv(text: str, source: str = "") -> LosTable:
    rows = list(csv.DictReader(io.StringIO("\n".join(_data_lines(text)))))
    by_env: dict[Environment, dict[float, float]] = {}
    for r in rows:
        env = Environment(r["environment"].strip())
        by_env.setdefault(env, {})[float(r["elevation_deg"])] = float(r["p_los"])
    if not by_env:
        raise ValueError("empty LoS table")
    nodes = {}
    for env, d in by_env.items():
        axis = sorted(d)
        nodes[env] = (np.array(axis), np.array([d[e] for e in axis]))
    return LosTable(nodes, source)


def load_attenuation_table(path: str | Path) -> AttenuationTable:
    return parse_attenuation_csv(Path(path).read_text(), str(path))


def load_los_table(path: str | Path) -> LosTable:
    return parse_los_csv(Path(path).read_text(), str(path))


@lru_cache(maxsize=None)
def default_attenuation_table() -> AttenuationTable:
    text = resources.files("leocov.data").joinpath("atmos_excess_default.csv").read_text()
    return parse_attenuation_csv(text, "leocov.data/atmos_excess_default.csv")


@lru_cache(maxsize=None)
def default_los_table() -> LosTable:
    text = resources.files("leocov.data").joinpath("los_probability.csv").read_text()
    return parse_los_csv(text, "leocov.data/los_probability.csv")


# --- building tables from anchor values -----------------------------------


def cosecant_fill(
    anchors: dict[float, float], nodes: Sequence[float]
) -> list[float]:
    """Values at ``nodes`` (deg) interpolated piecewise-linearly in
    ``1/sin(elevation)`` between anchor elevations.

    Slant-path attenuation grows roughly with air mass, which is close to
    the cosecant of elevation away from the horizon.
    """
    keys = sorted(anchors)
    if any(not 0 < k <= 90 for k in keys):
        raise DomainError("anchor elevations must lie in (0, 90]")
    csc = np.array([1.0 / math.sin(math.radians(k)) for k in keys])[::-1]
    vals = np.array([anchors[k] for k in keys])[::-1]
    out = []
    for n in nodes:
        if n in anchors:
            out.append(float(anchors[n]))
            continue
        if not keys[0] <= n <= keys[-1]:
            raise OutOfTableError(f"node {n} outside anchor range")
        out.append(float(np.interp(1.0 / math.sin(math.radians(n)), csc, vals)))
    return out


def attenuation_table_from_anchors(
    anchors: dict[float, dict[float, float]], elev_nodes: Sequence[float], source: str = ""
) -> AttenuationTable:
    freqs = sorted(anchors)
    vals = [cosecant_fill(anchors[f], elev_nodes) for f in freqs]
    return AttenuationTable(np.array(freqs), np.array(elev_nodes, dtype=float), np.array(vals), source)


# frequency (Hz) -> {elevation (deg): excess attenuation (dB)}
DEFAULT_ANCHORS: dict[float, dict[float, float]] = {
    2e9: {10.0: 0.8, 25.0: 0.2, 90.0: 0.05},
    10e9: {10.0: 2.5, 25.0: 1.2, 90.0: 0.3},
    28e9: {10.0: 10.0, 25.0: 5.0, 90.0: 2.0},
    50e9: {10.0: 32.0, 25.0: 14.0, 90.0: 7.0},
}
DEFAULT_ELEV_NODES = (10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0)
