import math
import time

import numpy as np
import pytest
from scipy import integrate, optimize

from leoship import analysis as an
from leoship import fading, geometry
from leoship.errors import InvalidArgumentError, NumericFailure
from leoship.model import NMILE_KM, default_scenario

R_U = 1250.0


def test_marine_success_values():
    assert an.p_bd(default_scenario(tau_db=8)) == pytest.approx(0.7841, abs=5e-4)
    assert an.p_bd(default_scenario(tau_db=13)) == pytest.approx(0.01357, abs=5e-5)


def test_marine_success_is_fast():
    sc = default_scenario(tau_db=8)
    t0 = time.perf_counter()
    for _ in range(100):
        an.p_bd(sc)
    assert (time.perf_counter() - t0) / 100 < 1e-3


def test_marine_success_invariant_to_common_scaling():
    sc = default_scenario(tau_db=9)
    link = sc.link
    scaled = sc.with_link(p_bd=link.p_bd * 7.0, sigma2_bd=link.sigma2_bd * 7.0)
    assert an.p_bd(scaled) == pytest.approx(an.p_bd(sc), rel=1e-12)


def test_marine_failure_mass():
    sc = default_scenario(tau_db=8)
    assert an.marine_failure_mass(sc) == pytest.approx(1 - an.p_bd(sc), abs=1e-12)


def test_approximate_marine_success_close():
    sc = default_scenario(tau_db=8)
    assert abs(an.p_bd(sc, approx=True) - an.p_bd(sc)) < 0.06


def test_laplace_at_zero(scenario):
    assert an.interference_laplace(scenario, R_U, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_laplace_single_channel_group():
    # N = K: nobody shares the serving channel, so only noise remains.
    sc = default_scenario(n_sats=100, n_channels=100)
    c = sc.fading.space.decay
    sig = sc.link.sigma2_d
    s0 = 2.0e11
    assert an.interference_laplace(sc, R_U, s0) == pytest.approx(math.exp(-s0 * c * sig), rel=1e-12)
    for order in (1, 2):
        exact = (-sig * c) ** order * math.exp(-s0 * c * sig)
        assert an.laplace_derivative(sc, R_U, s0, order) == pytest.approx(exact, rel=1e-6)


def _collapsed_laplace(sc, r_u, s):
    """L and its first two derivatives via e^{-s c sigma^2} q(s)^M.

    q(s) = 1 - P + (2/den) int phi(g s r^-alpha) r dr with the kappa-mu
    transform ``phi``, whose derivatives are taken by hand.
    """
    ln, con, sp = sc.link, sc.constellation, sc.fading.space
    km = fading.sr_to_kappa_mu(sp)
    c = sp.decay
    m, k, h = km.m, km.kappa, km.h_bar
    a = h / (1 + k)
    b = (k + m) * h / ((1 + k) * m)
    law = geometry.DistanceLaw(con)
    p_i = geometry.p_interferer(law, r_u)
    den = 4 * con.earth_radius_km * con.shell_radius_km - r_u ** 2 + con.altitude_km ** 2
    n_co = con.sats_per_channel - 1
    r_max = con.visible_distance_km

    def phi_derivs(x):
        phi = (1 + a * x) ** (m - 1) * (1 + b * x) ** (-m)
        u = (m - 1) * a / (1 + a * x) - m * b / (1 + b * x)
        du = -(m - 1) * a ** 2 / (1 + a * x) ** 2 + m * b ** 2 / (1 + b * x) ** 2
        return phi, phi * u, phi * (u * u + du)

    def moment(j):
        def f(r):
            w = ln.p_i * ln.g_i * c * (r * 1000.0) ** (-ln.alpha)
            return phi_derivs(w * s)[j] * w ** j * r
        return integrate.quad(f, r_u, r_max, epsabs=0, epsrel=1e-13, limit=200)[0]

    q = 1 - p_i + 2 / den * moment(0)
    q1 = 2 / den * moment(1)
    q2 = 2 / den * moment(2)
    e = math.exp(-s * c * ln.sigma2_d)
    g = -c * ln.sigma2_d
    big = q ** n_co
    big1 = n_co * q ** (n_co - 1) * q1
    big2 = n_co * (n_co - 1) * q ** (n_co - 2) * q1 ** 2 + n_co * q ** (n_co - 1) * q2
    return (e * big, e * (g * big + big1), e * (g * g * big + 2 * g * big1 + big2))


@pytest.mark.parametrize("tau_db", [0.0, 10.0, 20.0])
def test_laplace_derivatives_against_hand_derivation(scenario, tau_db):
    sc = scenario.with_tau_db(tau_db)
    s = an._downlink_s(sc, R_U, sc.tau_linear)
    ref = _collapsed_laplace(sc, R_U, s)
    for order in range(3):
        got = an.laplace_derivative(sc, R_U, s, order)
        assert got == pytest.approx(ref[order], rel=1e-6)


def test_laplace_matches_sampled_interference(scenario):
    sc = scenario
    con, ln, sp = sc.constellation, sc.link, sc.fading.space
    law = geometry.DistanceLaw(con)
    rng = np.random.default_rng(21)
    n = 200_000
    counts = rng.binomial(con.sats_per_channel - 1, geometry.p_interferer(law, R_U), n)
    owner = np.repeat(np.arange(n), counts)
    r_j = geometry.sample_visible_interferer_distance(con, np.full(owner.size, R_U), rng)
    h = fading.sample_sr(sp, rng, owner.size)
    i_w = np.bincount(owner, ln.p_i * ln.g_i * h * (r_j * 1000.0) ** (-ln.alpha), minlength=n)
    for tau_db in (0.0, 10.0, 20.0):
        s = an._downlink_s(sc, R_U, 10 ** (tau_db / 10))
        e = np.exp(-s * sp.decay * (ln.sigma2_d + i_w))
        assert abs(e.mean() - an.interference_laplace(sc, R_U, s)) < 3 * e.std() / math.sqrt(n) + 1e-12


def test_fd_derivative_exponential():
    for lam in (0.5, 3.0):
        for order, step in ((1, 1e-3), (2, 1e-3), (3, 1e-2)):
            d = an.fd_derivative(lambda s: np.exp(-lam * s), 0.7, order, step)
            assert d == pytest.approx((-lam) ** order * math.exp(-0.7 * lam), rel=1e-6)


def test_laplace_derivative_order_checked(scenario):
    with pytest.raises(InvalidArgumentError):
        an.laplace_derivative(scenario, R_U, 1e10, 3)
    with pytest.raises(InvalidArgumentError):
        an.interference_laplace(scenario, 100.0, 1e10)


def test_end_to_end_values():
    r8 = an.evaluate(default_scenario(tau_db=8), capacity=False)
    r13 = an.evaluate(default_scenario(tau_db=13), capacity=False)
    assert 0.85 <= r8.p_s <= 0.91
    assert 0.11 <= r13.p_s <= 0.16
    assert r8.p_s == pytest.approx(r8.p_bd + (1 - r8.p_bd) * r8.p_esd)
    assert r8.diagnostics["elapsed_p_s"] < 10


def test_success_probabilities_bounded_and_monotone():
    taus = np.arange(-10.0, 31.0, 5.0)
    ps = [an.p_s(default_scenario(tau_db=t)) for t in taus]
    assert all(0 <= p <= 1 for p in ps)
    assert all(a >= b for a, b in zip(ps, ps[1:]))


def test_low_threshold_limit():
    # Any visible satellite succeeds; with N = 1000 visibility is certain.
    visible = 1 - (1 - 1200 / (2 * 7571)) ** 1000
    assert an.p_esd(default_scenario(tau_db=-40)) == pytest.approx(visible, abs=1e-4)


def test_uplink_ccdf_limits(scenario):
    assert an.uplink_ccdf(scenario, R_U, 1e-9) == pytest.approx(1.0, abs=1e-6)
    assert an.uplink_ccdf(scenario, R_U, 1e9) == pytest.approx(0.0, abs=1e-12)


def test_capacity_vanishes_at_huge_threshold():
    assert an.c_bd(default_scenario(tau_db=60)) == 0.0


def test_capacity_decomposition():
    res = an.evaluate(default_scenario(tau_db=8))
    assert res.c_s == pytest.approx(res.c_bd + res.c_esd)
    assert res.c_s == pytest.approx(226.56e6, rel=2e-3)
    assert res.c_bd <= an.c_marine(default_scenario(tau_db=8))


def test_short_marine_link_uses_marine_only():
    sc = default_scenario(tau_db=8, r_bd_nmile=5)
    assert an.marine_failure_mass(sc) < 1e-5
    assert an.c_esd(sc) < 1e-5 * an.c_bd(sc)


def test_awgn_marine_rate():
    sc = default_scenario(tau_db=0, k_rician=1e6)
    expected = 30e6 * math.log2(1 + 80 * 10 ** 0.2 * 74080.0 ** -2.9 / 1e-13)
    assert an.c_s_awgn_limit(sc) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(101.8e6, rel=5e-3)
    assert an.c_s(sc) == pytest.approx(expected, rel=0.02)


def test_switch_radius_matches_deterministic_marine_link():
    sc = default_scenario(k_rician=1e6)
    r_sw = an.switch_radius_km(sc)
    expected = (80 * 10 ** 0.2 / (10 * 1e-13)) ** (1 / 2.9) / 1000
    assert r_sw == pytest.approx(expected, rel=1e-12)
    half = optimize.brentq(
        lambda r: an.p_bd(default_scenario(k_rician=1e6, r_bd_nmile=r / NMILE_KM)) - 0.5,
        r_sw * 0.8, r_sw * 1.2, xtol=1e-9)
    assert half == pytest.approx(r_sw, rel=1e-3)


@pytest.mark.parametrize("r_bd_nmile", [30.0, 50.0])
def test_awgn_limit_on_both_sides_of_switch(r_bd_nmile):
    sc = default_scenario(k_rician=1e6, r_bd_nmile=r_bd_nmile)
    assert an.c_s(sc) == pytest.approx(an.c_s_awgn_limit(sc), rel=0.02)


def test_quadrature_failure_is_reported(scenario):
    with pytest.raises(InvalidArgumentError):
        an.QuadratureSettings(max_subdivisions=1)
    tight = an.QuadratureSettings(abs_tol=1e-300, rel_tol=1e-300, max_subdivisions=8)
    with pytest.raises(NumericFailure) as info:
        an.p_esd(scenario, qs=tight)
    assert info.value.diagnostics
