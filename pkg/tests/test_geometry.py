import math

import numpy as np
import pytest
from scipy import integrate, stats

from leoship import geometry as g
from leoship.errors import InvalidArgumentError
from leoship.model import ConstellationSpec

SPEC = ConstellationSpec(1000, 10, 1200.0)
LAW = g.DistanceLaw(SPEC)


def test_ru_cdf_value():
    assert g.ru_cdf(LAW, 1300.0) == pytest.approx(0.7265, abs=5e-4)


def test_ru_cdf_limits():
    lo, hi = LAW.ru_support
    assert g.ru_cdf(LAW, lo) == 0.0
    assert g.ru_cdf(LAW, hi) == 1.0
    assert g.ru_cdf(LAW, 0.0) == 0.0
    r = np.linspace(lo, 2500, 200)
    assert np.all(np.diff(g.ru_cdf(LAW, r)) >= 0)


@pytest.mark.parametrize("n_sats", [1, 50, 1000])
def test_ru_pdf_normalised(n_sats):
    law = g.DistanceLaw(ConstellationSpec(n_sats, 1, 1200.0))
    lo, hi = law.ru_support
    pts = [lo + (hi - lo) * f for f in (1e-4, 1e-3, 1e-2, 0.1)]
    total, _ = integrate.quad(lambda r: g.ru_pdf(law, r), lo, hi, points=pts, limit=500,
                              epsabs=1e-12, epsrel=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)


def test_ru_pdf_is_cdf_derivative():
    r = np.linspace(1210.0, 1700.0, 25)
    h = 1e-3
    fd = (g.ru_cdf(LAW, r + h) - g.ru_cdf(LAW, r - h)) / (2 * h)
    np.testing.assert_allclose(g.ru_pdf(LAW, r), fd, rtol=1e-6)


def test_rj_pdf_normalised():
    r_u = 1300.0
    total, _ = integrate.quad(lambda r: g.rj_pdf_given_ru(LAW, r, r_u), r_u,
                              LAW.ru_support[1], epsabs=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(InvalidArgumentError):
        g.rj_pdf_given_ru(LAW, 1500.0, 100.0)


def test_p_interferer_values():
    assert g.p_interferer(LAW, 1200.0) == pytest.approx(1200 / (2 * 7571), rel=1e-12)
    assert g.p_interferer(LAW, 1200.0) == pytest.approx(0.07925, abs=1e-5)
    assert 99 * g.p_interferer(LAW, 1200.0) == pytest.approx(7.85, abs=0.01)
    assert g.p_interferer(LAW, SPEC.visible_distance_km) == pytest.approx(0.0, abs=1e-15)
    assert g.p_interferer(LAW, 5000.0) == 0.0


def test_p_interferer_matches_conditional_law():
    # P(R_j <= r_max | R_j > r_u) from the interferer density
    for r_u in (1200.0, 1800.0, 3000.0):
        mass, _ = integrate.quad(lambda r: g.rj_pdf_given_ru(LAW, r, r_u), r_u,
                                 SPEC.visible_distance_km)
        assert g.p_interferer(LAW, r_u) == pytest.approx(mass, abs=1e-10)


def test_approx_rd():
    assert g.approx_rd(1200.0, 74.08) == pytest.approx(1202.28, abs=0.01)


def test_rd_law():
    law = g.DistanceLaw(SPEC, 74.08)
    lo, hi = law.rd_support
    total, _ = integrate.quad(lambda r: g.rd_pdf(law, r), lo, hi, points=[lo + 10, lo + 100],
                              limit=500, epsabs=1e-12, epsrel=1e-12)
    assert total == pytest.approx(1.0, abs=1e-8)
    assert g.rd_cdf(law, g.approx_rd(1300.0, 74.08)) == pytest.approx(g.ru_cdf(LAW, 1300.0))


def test_sample_ru_ks():
    rng = np.random.default_rng(1)
    draws = g.sample_ru(LAW, rng, 10 ** 6)
    assert stats.kstest(draws, lambda x: g.ru_cdf(LAW, x)).statistic < 0.002


def test_sample_ru_inverse():
    u = np.array([0.0, 0.25, 0.5, 0.99])
    r = g.sample_ru(LAW, None, u=u)
    np.testing.assert_allclose(g.ru_cdf(LAW, r), u, atol=1e-12)


def test_interferer_sampler_ks():
    rng = np.random.default_rng(2)
    r_u = 1500.0
    draws = g.sample_visible_interferer_distance(SPEC, np.full(200_000, r_u), rng)
    r_max = SPEC.visible_distance_km
    cdf = lambda r: (np.clip(r, r_u, r_max) ** 2 - r_u ** 2) / (r_max ** 2 - r_u ** 2)
    assert stats.kstest(draws, cdf).statistic < 0.005


def test_constellation_on_shell_and_uniform():
    rng = np.random.default_rng(3)
    con = g.sample_constellation(SPEC, rng)
    np.testing.assert_allclose(np.linalg.norm(con.positions_km, axis=1), SPEC.shell_radius_km)
    assert np.bincount(con.channels).tolist() == [100] * 10
    pts = con.points()
    assert len(pts) == 1000
    np.testing.assert_allclose(pts[0].position_km, con.positions_km[0])

    pos, _ = g.sample_constellations(ConstellationSpec(1000, 1, 1200.0), rng, 1000)
    z = pos[..., 2].ravel() / SPEC.shell_radius_km
    assert abs(z.mean()) < 3 * math.sqrt(1 / 3) / math.sqrt(z.size)


def test_constellation_nearest_distance_matches_law():
    spec = ConstellationSpec(50, 1, 1200.0)
    law = g.DistanceLaw(spec)
    rng = np.random.default_rng(4)
    es = g.surface_point(spec, 0.0)
    nearest = []
    for _ in range(5):
        pos, _ = g.sample_constellations(spec, rng, 20_000)
        nearest.append(np.linalg.norm(pos - es, axis=-1).min(axis=1))
    nearest = np.concatenate(nearest)
    assert stats.kstest(nearest, lambda x: g.ru_cdf(law, x)).statistic < 0.01


def test_co_channel_distances_given_nearest():
    # Non-serving satellites are uniform on the shell beyond the nearest one.
    rng = np.random.default_rng(5)
    pos, _ = g.sample_constellations(SPEC, rng, 400)
    d = np.linalg.norm(pos - g.surface_point(SPEC, 0.0), axis=-1)
    d.sort(axis=1)
    r_u = d[:, :1]
    rest = d[:, 1:]
    den = 4 * SPEC.earth_radius_km * SPEC.shell_radius_km - r_u ** 2 + SPEC.altitude_km ** 2
    u = ((rest ** 2 - r_u ** 2) / den).ravel()
    assert stats.kstest(u, "uniform").statistic < 0.02


def test_surface_point():
    p = g.surface_point(SPEC, 100.0)
    assert np.linalg.norm(p) == pytest.approx(SPEC.earth_radius_km)
    chord = np.linalg.norm(p - g.surface_point(SPEC, 0.0))
    assert chord == pytest.approx(100.0, rel=1e-4)
