import math
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leocov.constellation import SatelliteElement, WalkerShell, expand_shell
from leocov.errors import ConfigurationError
from leocov.geo_core import CONSTANTS, R_E
from leocov.propagation import (
    Ephemeris,
    TimeGrid,
    inertial_positions,
    j2_raan_rate,
    propagate,
    write_ephemeris_csv,
)

T0 = datetime(2025, 1, 1, tzinfo=timezone.utc)


def _element(h=1000.0, inc=75.0, raan=0.0, u0=0.0):
    a = R_E + h
    return SatelliteElement((0, 0), raan, u0, inc, a, math.sqrt(CONSTANTS.mu / a**3))


def _to_inertial(eph: Ephemeris, gmst0_deg=0.0) -> np.ndarray:
    theta = math.radians(gmst0_deg) + CONSTANTS.omega_e * eph.grid.offsets()
    c, s = np.cos(theta), np.sin(theta)
    x, y, z = eph.xyz[..., 0], eph.xyz[..., 1], eph.xyz[..., 2]
    return np.stack([c * x - s * y, s * x + c * y, z], axis=-1)


def _measured_period_s(h: float) -> float:
    grid = TimeGrid(T0, 4 * 3 * 3600.0, 5.0)
    eph = propagate([_element(h)], grid, gmst0_deg=37.0)
    z = _to_inertial(eph, 37.0)[0, :, 2]
    t = grid.offsets()
    up = np.nonzero((z[:-1] < 0) & (z[1:] >= 0))[0]
    # linear interpolation of each ascending node crossing
    tc = t[up] - z[up] * (t[up + 1] - t[up]) / (z[up + 1] - z[up])
    return float(np.mean(np.diff(tc)))


def test_periods():
    assert _measured_period_s(500) / 60 == pytest.approx(94, abs=1)
    assert _measured_period_s(1200) / 60 == pytest.approx(109, abs=1)
    a = R_E + 1200
    assert _measured_period_s(1200) == pytest.approx(2 * math.pi * math.sqrt(a**3 / CONSTANTS.mu), rel=1e-6)


def test_identity_configuration():
    grid = TimeGrid(T0, 60.0, 60.0)
    eph = propagate([_element(inc=0.0)], grid)
    assert eph.xyz[0, 0] == pytest.approx([R_E + 1000, 0, 0], abs=1e-9)
    # an equatorial satellite and the Earth turn the same way
    n = _element().mean_motion_rad_s
    ang = math.atan2(eph.xyz[0, 1, 1], eph.xyz[0, 1, 0])
    assert ang == pytest.approx((n - CONSTANTS.omega_e) * 60.0, abs=1e-12)


def test_gmst_offset_rotates_frame():
    grid = TimeGrid(T0, 600.0, 60.0)
    a = propagate([_element()], grid, gmst0_deg=0.0).xyz[0]
    b = propagate([_element()], grid, gmst0_deg=90.0).xyz[0]
    # a 90 deg Greenwich angle maps inertial x to Earth-fixed -y
    assert b[:, 0] == pytest.approx(a[:, 1], abs=1e-8)
    assert b[:, 1] == pytest.approx(-a[:, 0], abs=1e-8)


def test_polar_orbit_reaches_poles():
    grid = TimeGrid(T0, 7200.0, 1.0)
    eph = propagate([_element(inc=90.0)], grid)
    xyz = eph.xyz[0]
    lat = np.degrees(np.arcsin(xyz[:, 2] / np.linalg.norm(xyz, axis=1)))
    assert lat.max() > 89.9 and lat.min() < -89.9


@settings(max_examples=25, deadline=None)
@given(inc=st.floats(0, 179.9), h=st.floats(300, 2000), raan=st.floats(0, 360), u0=st.floats(0, 360))
def test_latitude_bounded_by_inclination(inc, h, raan, u0):
    grid = TimeGrid(T0, 3 * 3600.0, 30.0)
    xyz = propagate([_element(h, inc, raan, u0)], grid).xyz[0]
    lat = np.degrees(np.arcsin(np.clip(xyz[:, 2] / np.linalg.norm(xyz, axis=1), -1, 1)))
    bound = min(inc, 180 - inc)
    assert np.all(np.abs(lat) <= bound + 1e-9)


@pytest.mark.parametrize("j2", [False, True])
def test_radius_conserved(j2):
    shell = WalkerShell("delta", 75, 64, 8, 3, 1000)
    eph = propagate(expand_shell(shell), TimeGrid.days(1, 10), j2_enabled=j2)
    r = np.sqrt(eph.squared_radius)
    drift = np.abs(r / (R_E + 1000) - 1)
    assert drift.max() < (1e-6 if j2 else 1e-9)
    assert eph.circular_radius is not None


def test_periodic_in_inertial_frame():
    el = _element(800, 53, 20, 40)
    t = np.array([0.0, 2 * math.pi / el.mean_motion_rad_s])
    pos = inertial_positions([el], t)[0]
    assert pos[1] == pytest.approx(pos[0], abs=1e-6)


def test_j2_drift():
    el = _element(1000, 75)
    rate = j2_raan_rate(el.semi_major_axis_km, 75, el.mean_motion_rad_s)
    assert rate < 0
    assert j2_raan_rate(el.semi_major_axis_km, 90, el.mean_motion_rad_s) == pytest.approx(0, abs=1e-20)
    day = inertial_positions([el], np.array([86400.0]), j2_enabled=True)[0, 0]
    nominal = inertial_positions([_element(1000, 75, math.degrees(rate * 86400))], np.array([86400.0]))[0, 0]
    assert day == pytest.approx(nominal, abs=1e-6)


def test_element_epoch_lead():
    grid = TimeGrid(T0 + timedelta(seconds=600), 600.0, 60.0)
    el = _element()
    later = propagate([el], grid, element_epoch=T0)
    ref = inertial_positions([el], grid.offsets() + 600.0)[0]
    assert _to_inertial(later)[0] == pytest.approx(ref, abs=1e-8)


def test_deterministic(tmp_path):
    shell = WalkerShell("star", 86.4, 66, 6, 2, 778)
    grid = TimeGrid.days(0.1, 30)
    a = propagate(expand_shell(shell), grid, j2_enabled=True, gmst0_deg=12.5)
    b = propagate(expand_shell(shell), grid, j2_enabled=True, gmst0_deg=12.5)
    assert a.xyz.tobytes() == b.xyz.tobytes()
    pa = write_ephemeris_csv(a, tmp_path / "a.csv", ["x"])
    pb = write_ephemeris_csv(b, tmp_path / "b.csv", ["x"])
    assert pa.read_bytes() == pb.read_bytes()
    lines = pa.read_text().splitlines()
    assert lines[0] == "# x" and lines[1] == "sat_id,t_offset_s,x_km,y_km,z_km"


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        TimeGrid(T0, 100.0, 30.0)
    with pytest.raises(ConfigurationError):
        TimeGrid(T0.replace(tzinfo=None), 100.0, 10.0)
    with pytest.raises(ConfigurationError):
        TimeGrid(T0, 100.0, 0.0)
    g = TimeGrid.days(5, 10)
    assert g.n_samples == 43201
    assert g.timestamp(6) == T0 + timedelta(minutes=1)
    with pytest.raises(ConfigurationError):
        propagate([], g)


def test_ephemeris_mapping():
    shell = WalkerShell("delta", 53, 6, 2, 1, 550)
    eph = propagate(expand_shell(shell), TimeGrid(T0, 60.0, 30.0))
    assert len(eph) == 6 and list(eph)[1] == (0, 1)
    assert eph[(1, 2)].shape == (3, 3)
    assert eph.position((1, 2), 1).to_array() == pytest.approx(eph[(1, 2)][1])
    with pytest.raises(ValueError):
        eph.xyz[0, 0, 0] = 1.0
    sub = eph.subset([(1, 0)])
    assert sub.sat_ids == [(1, 0)]
