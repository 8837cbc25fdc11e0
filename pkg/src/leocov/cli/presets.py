"""Built-in scenario documents.

Constellation presets are single-shell approximations of operational
systems; their phasing factors are not public, so every one uses F = 1
under the classic per-satellite rule.

The ``paper-fig*`` scenarios are the 64-satellite Walker Delta
parametric studies (h = 1000 km, F = 3). They use classic per-satellite
phasing: with the per-plane rule, F = 3 over P = 8 planes of 8 satellites
shifts each plane by a whole slot, lines the slots up across planes and
leaves the polar cap partly uncovered even at a 20 deg mask.
"""
from __future__ import annotations

import copy

CONSTELLATIONS = {
    "iridium-next": {
        "pattern": "star", "inclination_deg": 86.4, "total_sats": 66, "planes": 6,
        "phasing": 1, "altitude_km": 778.0, "phasing_convention": "classic-per-sat",
    },
    "oneweb": {
        "pattern": "star", "inclination_deg": 87.9, "total_sats": 648, "planes": 12,
        "phasing": 1, "altitude_km": 1200.0, "phasing_convention": "classic-per-sat",
    },
    "globalstar": {
        "pattern": "delta", "inclination_deg": 52.0, "total_sats": 24, "planes": 8,
        "phasing": 1, "altitude_km": 1414.0, "phasing_convention": "classic-per-sat",
    },
    "starlink-shell1": {
        "pattern": "delta", "inclination_deg": 53.0, "total_sats": 1584, "planes": 72,
        "phasing": 1, "altitude_km": 550.0, "phasing_convention": "classic-per-sat",
    },
}


def _study_shell(inclination: float = 75.0) -> dict:
    return {
        "pattern": "delta", "inclination_deg": inclination, "total_sats": 64, "planes": 8,
        "phasing": 3, "altitude_km": 1000.0, "phasing_convention": "classic-per-sat",
    }


_GRID = {"days": 5, "step_s": 10}

SCENARIOS = {
    "paper-fig6": {
        "mode": "sweep",
        "name": "Coverage and revisit versus latitude and elevation mask, 75:64/8/3",
        "shell": _study_shell(),
        "grid": _GRID,
        "sweep": {"param": "elevation", "values": "0:90:10", "lat": "55:90:1"},
    },
    "paper-fig9": {
        "mode": "sweep",
        "name": "Coverage and mean visible count versus latitude and inclination, i:64/8/3",
        "shell": _study_shell(),
        "grid": _GRID,
        "mask": {"eps_deg": 40.0},
        "sweep": {"param": "inclination", "values": "55:90:5", "lat": "55:90:1"},
    },
}
for _suffix, _eps in (("a", 20.0), ("b", 40.0), ("c", 60.0)):
    SCENARIOS[f"paper-fig7{_suffix}"] = {
        "mode": "map",
        "name": f"North Atlantic coverage map, 75:64/8/3, mask {_eps:g} deg",
        "shell": _study_shell(),
        "grid": _GRID,
        "mask": {"eps_deg": _eps},
        "map": {"lat_min": 50.0, "lat_max": 90.0, "lon_min": -80.0, "lon_max": 40.0, "resolution": 1.0},
    }
for _suffix, _inc in (("a", 55.0), ("b", 75.0), ("c", 90.0)):
    SCENARIOS[f"paper-fig10{_suffix}"] = {
        "mode": "map",
        "name": f"North Atlantic coverage map, {_inc:g}:64/8/3, mask 40 deg",
        "shell": _study_shell(_inc),
        "grid": _GRID,
        "mask": {"eps_deg": 40.0},
        "map": {"lat_min": 50.0, "lat_max": 90.0, "lon_min": -80.0, "lon_max": 40.0, "resolution": 1.0},
    }
SCENARIOS["paper-fig8"] = {**SCENARIOS["paper-fig6"], "name": "Revisit time versus latitude and elevation mask, 75:64/8/3"}
SCENARIOS["paper-fig11"] = {**SCENARIOS["paper-fig9"], "name": "Revisit time versus latitude and inclination, i:64/8/3"}

for _name, _shell in CONSTELLATIONS.items():
    SCENARIOS[_name] = {
        "mode": "sweep",
        "name": f"{_name} single-shell approximation, latitude sweep at 40 deg mask",
        "shell": _shell,
        "grid": {"days": 1, "step_s": 30},
        "mask": {"eps_deg": 40.0},
        "sweep": {"param": "elevation", "values": [40.0], "lat": "0:90:5"},
    }


def preset_names() -> list[str]:
    return sorted(SCENARIOS)


def get_preset(name: str) -> dict:
    try:
        return copy.deepcopy(SCENARIOS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(preset_names())}") from None


def preset_shell(name: str) -> dict:
    if name in CONSTELLATIONS:
        return copy.deepcopy(CONSTELLATIONS[name])
    return get_preset(name)["shell"]
