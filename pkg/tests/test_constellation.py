import math
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leocov.constellation import (
    PhasingConvention,
    WalkerPattern,
    WalkerShell,
    expand_shell,
    format_tle,
    parse_tle,
    read_tle_file,
    tle_checksum,
    tle_export,
    write_tle_file,
)
from leocov.errors import ConfigurationError, ExportError

from oracles import tle_pair_problems


def _shell(**kw):
    base = dict(pattern="delta", inclination_deg=75.0, total_sats=64, planes=8, phasing=3,
                altitude_km=1000.0)
    base.update(kw)
    return WalkerShell(**base)


def test_validator_catches_corruption():
    # the oracle itself must reject broken records before it is trusted
    l1, l2 = tle_export(_shell())[0]
    assert tle_pair_problems(l1, l2) == []
    bad_sum = l2[:68] + str((int(l2[68]) + 1) % 10)
    assert "checksum" in tle_pair_problems(l1, bad_sum)
    shifted = l2[:8] + l2[9:] + " "
    assert tle_pair_problems(l1, shifted)
    assert tle_pair_problems(l1[:-1], l2) == ["length 68"]


def test_known_checksum():
    # ISS record from a public catalogue
    line = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927"
    assert tle_checksum(line) == 7
    line2 = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537"
    assert tle_checksum(line2) == 7


def test_expand_delta_layout():
    els = expand_shell(_shell(phasing_convention="classic-per-sat"))
    assert len(els) == 64
    assert [e.sat_id for e in els[:9]] == [(0, k) for k in range(8)] + [(1, 0)]
    raans = sorted({e.raan_deg for e in els})
    assert raans == pytest.approx(np.arange(8) * 45.0)
    # plane p slot k sits at k*45 + p*F*360/T
    for e in els:
        p, k = e.sat_id
        assert e.initial_arg_latitude_deg == pytest.approx((k * 45 + p * 3 * 360 / 64) % 360)


def test_expand_star_and_per_plane_phasing():
    els = expand_shell(_shell(pattern="star", total_sats=66, planes=6, phasing=2,
                              inclination_deg=86.4))
    assert sorted({e.raan_deg for e in els}) == pytest.approx(np.arange(6) * 30.0)
    p1 = [e for e in els if e.sat_id == (1, 0)][0]
    assert p1.initial_arg_latitude_deg == pytest.approx(2 * 180 / 6)


def test_raan0_offset_and_defaults():
    els = expand_shell(_shell(raan0_deg=350.0))
    assert els[8].raan_deg == pytest.approx(35.0)
    assert _shell().phasing_convention is PhasingConvention.PAPER_PER_PLANE
    assert _shell().pattern is WalkerPattern.DELTA
    assert _shell().notation == "delta 75:64/8/3"


def test_mean_motion():
    e = expand_shell(_shell())[0]
    a = 6378.0 + 1000.0
    assert e.semi_major_axis_km == a
    assert e.period_s == pytest.approx(2 * math.pi * math.sqrt(a**3 / 398600.4418))


@pytest.mark.parametrize(
    "kw, text",
    [
        (dict(total_sats=10, planes=4), "divide"),
        (dict(phasing=8), "phasing"),
        (dict(phasing=-1), "phasing"),
        (dict(planes=0), "planes"),
        (dict(inclination_deg=181.0), "inclination"),
        (dict(altitude_km=0.0), "altitude"),
        (dict(pattern="rosette"), "pattern"),
        (dict(total_sats=0), "total_sats"),
    ],
)
def test_configuration_errors(kw, text):
    with pytest.raises(ConfigurationError, match=text):
        _shell(**kw)


@pytest.mark.parametrize(
    "shell",
    [
        _shell(),
        _shell(pattern="star", inclination_deg=86.4, total_sats=66, planes=6, phasing=1,
               altitude_km=778.0),
        _shell(inclination_deg=53.0, total_sats=1584, planes=72, phasing=1, altitude_km=550.0,
               raan0_deg=359.99999),
        _shell(inclination_deg=179.9999, total_sats=12, planes=3, phasing=2, altitude_km=2000.0),
    ],
)
def test_every_exported_line_is_valid(shell):
    pairs = tle_export(shell)
    assert len(pairs) == shell.total_sats
    bad = [(l1, l2, p) for l1, l2 in pairs if (p := tle_pair_problems(l1, l2))]
    assert bad == []


@settings(max_examples=40, deadline=None)
@given(
    inc=st.floats(0, 179.99),
    planes=st.integers(1, 12),
    spp=st.integers(1, 12),
    f=st.integers(0, 11),
    alt=st.floats(160, 2000),
    raan0=st.floats(0, 359.999),
)
def test_export_property(inc, planes, spp, f, alt, raan0):
    shell = _shell(inclination_deg=inc, total_sats=planes * spp, planes=planes,
                   phasing=f % planes, altitude_km=alt, raan0_deg=raan0)
    for l1, l2 in tle_export(shell):
        assert tle_pair_problems(l1, l2) == []


def test_round_trip(tmp_path):
    shell = _shell(epoch=datetime(2025, 3, 1, 12, tzinfo=timezone.utc))
    path = write_tle_file(shell, tmp_path / "c.tle")
    pairs = read_tle_file(path)
    els = expand_shell(shell)
    assert len(pairs) == len(els)
    for el, (l1, l2) in zip(els, pairs):
        t = parse_tle(l1, l2)
        assert t.epoch_year == 2025
        assert t.epoch_day == pytest.approx(60.5)
        assert t.inclination_deg == pytest.approx(el.inclination_deg, abs=5e-5)
        assert t.raan_deg == pytest.approx(el.raan_deg, abs=5e-5)
        assert t.eccentricity == 0.0
        assert (t.mean_anomaly_deg - el.initial_arg_latitude_deg + 180) % 360 - 180 == pytest.approx(0, abs=5e-5)
        assert t.mean_motion_rev_day == pytest.approx(86400 / el.period_s, abs=1e-8)
    assert path.read_text().splitlines()[0] == "WALKER-P00S00"


def test_names_optional(tmp_path):
    path = write_tle_file(_shell(), tmp_path / "c.tle", with_names=False)
    lines = path.read_text().splitlines()
    assert len(lines) == 128 and lines[0].startswith("1 ")


def test_export_errors():
    el = expand_shell(_shell())[0]
    with pytest.raises(ExportError):
        format_tle(el, 100000, datetime(2025, 1, 1, tzinfo=timezone.utc))
    with pytest.raises(ExportError):
        format_tle(el, 1, datetime(2070, 1, 1, tzinfo=timezone.utc))
    with pytest.raises(ExportError):
        tle_export(_shell(total_sats=10010, planes=10, phasing=1))


def test_sgp4_agrees_with_two_body():
    sgp4_api = pytest.importorskip("sgp4.api")
    from leocov.propagation import TimeGrid, inertial_positions

    shell = _shell(phasing_convention="classic-per-sat")
    els = expand_shell(shell)
    l1, l2 = tle_export(shell)[9]
    sat = sgp4_api.Satrec.twoline2rv(l1, l2)
    jd, fr = sat.jdsatepoch, sat.jdsatepochF
    err, r, _ = sat.sgp4(jd, fr)
    assert err == 0
    ours = inertial_positions([els[9]], np.array([0.0]), j2_enabled=False)[0, 0]
    # SGP4 mean elements differ from osculating two-body ones by a few km
    assert np.linalg.norm(np.array(r) - ours) < 30.0
