import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from leoship.errors import InvalidArgumentError
from leoship.model import (
    NMILE_KM, BeamPattern, ConstellationSpec, antenna_gain, default_link_budget,
    default_scenario, interference_sum, sinr_downlink, snr_marine, snr_uplink, unit_convert,
)


@pytest.fixture(scope="module")
def link():
    return default_link_budget()


def test_nautical_miles():
    assert unit_convert(40, "nmile->km") == pytest.approx(74.08, rel=1e-12)
    assert unit_convert(74.08, "km->nmile") == pytest.approx(40, rel=1e-12)
    assert 40 * NMILE_KM == pytest.approx(74.08)


def test_decibel_conversions():
    assert unit_convert(30, "db->linear") == pytest.approx(1000.0)
    assert unit_convert(1000.0, "linear->db") == pytest.approx(30.0)
    assert unit_convert(-90, "dbm->watts") == pytest.approx(1e-12)
    assert unit_convert(1e-12, "watts->dbm") == pytest.approx(-90.0)
    assert unit_convert(48, "dbi->linear") == pytest.approx(10 ** 4.8)


def test_noise_density_over_bandwidth():
    # -174 dBm/Hz over 30 MHz
    w = unit_convert(-174, "psd_bw->watts", bandwidth_hz=30e6)
    assert w == pytest.approx(10 ** (-17.4 - 3) * 30e6, rel=1e-12)
    assert w == pytest.approx(1.194e-13, rel=1e-3)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_non_finite_rejected(bad):
    with pytest.raises(InvalidArgumentError):
        unit_convert(bad, "db->linear")


def test_unknown_kind_rejected():
    with pytest.raises(InvalidArgumentError):
        unit_convert(1.0, "furlong->km")


@given(st.floats(-200, 200))
def test_db_round_trip(x):
    assert unit_convert(unit_convert(x, "db->linear"), "linear->db") == pytest.approx(x, abs=1e-9)


def test_marine_snr_anchor(link):
    # hand arithmetic: 80 * 10^0.2 * 74080^-2.9 / 1e-13
    expected = 80 * 10 ** 0.2 * 74080.0 ** -2.9 / 1e-13
    assert snr_marine(link, 1.0, 74080.0) == pytest.approx(expected, rel=1e-12)
    assert 9.4 < expected < 9.7


def test_uplink_snr_anchor(link):
    spec = ConstellationSpec(1000, 10, 1200.0)
    expected = 25 * 10 ** 4.8 * 1.2e6 ** -2.4 / 1e-12
    assert snr_uplink(link, spec, 1.0, 1.2e6) == pytest.approx(expected, rel=1e-12)
    assert 3.9e3 < expected < 4.2e3


def test_uplink_zero_below_horizon(link):
    spec = ConstellationSpec(1000, 10, 1200.0)
    r_max_m = spec.visible_distance_km * 1000
    assert snr_uplink(link, spec, 1.0, r_max_m * 1.001) == 0.0
    assert snr_uplink(link, spec, 1.0, r_max_m) > 0.0


def test_downlink_sinr_anchor(link):
    expected = 10 * 10 ** 3.85 * 1.2e6 ** -2.4 / 1e-12
    assert sinr_downlink(link, 1.0, 1.2e6) == pytest.approx(expected, rel=1e-12)
    assert 180 < expected < 183


def test_interference_anchor(link):
    expected = 10 * 10 ** 2.85 * 1.2e6 ** -2.4
    assert interference_sum(link, [(1.0, 1.2e6)]) == pytest.approx(expected, rel=1e-12)
    assert interference_sum(link, []) == 0.0


def test_interference_order_independent(link, rng):
    pairs = [(float(h), float(r)) for h, r in zip(rng.exponential(size=200),
                                                   rng.uniform(1.2e6, 4e6, 200))]
    a = interference_sum(link, pairs)
    b = interference_sum(link, pairs[::-1])
    assert a == b


def test_sinr_decreases_with_interference(link):
    i = np.array([0.0, 1e-13, 1e-12, 1e-11])
    out = sinr_downlink(link, 1.0, 1.5e6, i)
    assert np.all(np.diff(out) < 0)
    assert sinr_downlink(link, 1.0, 1.5e6, math.inf) == 0.0


@given(st.floats(1e3, 1e6), st.floats(1.01, 2.0))
def test_snr_decreases_with_distance(r, factor):
    link = default_link_budget()
    assert snr_marine(link, 1.0, r * factor) < snr_marine(link, 1.0, r)


def test_invalid_distances(link):
    with pytest.raises(InvalidArgumentError):
        snr_marine(link, 1.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        sinr_downlink(link, 1.0, -1.0)
    with pytest.raises(InvalidArgumentError):
        interference_sum(link, [(1.0, 0.0)])


def test_antenna_gain_threshold_inclusive():
    pat = BeamPattern(0.1, 100.0, 1.0)
    assert antenna_gain(pat, 0.1) == 100.0
    assert antenna_gain(pat, 0.1000001) == 1.0
    assert np.array_equal(antenna_gain(pat, [0.0, 0.2]), [100.0, 1.0])


def test_constellation_validation():
    with pytest.raises(InvalidArgumentError):
        ConstellationSpec(1000, 7, 1200.0)
    with pytest.raises(InvalidArgumentError):
        ConstellationSpec(10, 20, 1200.0)
    with pytest.raises(InvalidArgumentError):
        ConstellationSpec(10, 1, 0.0)
    spec = ConstellationSpec(1000, 10, 1200.0)
    assert spec.sats_per_channel == 100
    assert spec.visible_distance_km == pytest.approx(math.sqrt(2 * 6371 * 1200 + 1200 ** 2))


def test_link_budget_validation(link):
    from dataclasses import replace
    with pytest.raises(InvalidArgumentError):
        replace(link, alpha=1.0)
    with pytest.raises(InvalidArgumentError):
        replace(link, p_d=0.0)


def test_default_scenario():
    sc = default_scenario()
    assert sc.r_bd_km == pytest.approx(74.08)
    assert sc.tau_db == pytest.approx(10.0)
    assert sc.with_tau_db(8).tau_linear == pytest.approx(10 ** 0.8)
    assert sc.with_constellation(n_sats=500).constellation.n_sats == 500
    with pytest.raises(InvalidArgumentError):
        default_scenario(bogus=1)
