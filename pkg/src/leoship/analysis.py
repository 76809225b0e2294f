"""
Success probability and rate capacity of the threshold-switched shore-to-ship link.

The marine link succeeds with probability ``p_bd``; when it fails the
traffic is relayed over the satellite, which succeeds with probability
``p_esd``.  Capacities follow the same split over the marine envelope.

Conventions: geometry in km, path loss in metres, rates in bit/s.  The
interference Laplace transform is a function of the *threshold-scaled*
argument ``s`` (``s = tau * R_d^alpha / (p_d g_d)``); the ``beta - delta``
factor of the Shadowed Rician series is folded in internally.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize, stats

from . import fading, geometry
from .errors import InvalidArgumentError, NumericFailure
from .model import Scenario

__all__ = [
    "QuadratureSettings",
    "LaplaceDerivativeSettings",
    "TheoryResult",
    "p_bd",
    "interference_laplace",
    "laplace_derivative",
    "fd_derivative",
    "downlink_ccdf",
    "uplink_ccdf",
    "p_esd_given_ru",
    "p_esd",
    "p_s",
    "c_bd",
    "c_marine",
    "marine_failure_mass",
    "space_capacity_given_ru",
    "c_esd",
    "c_s",
    "switch_radius_km",
    "c_s_awgn_limit",
    "evaluate",
]


@dataclass(frozen=True)
class QuadratureSettings:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-6
    max_subdivisions: int = 2000
    t_max_bits: float = 60.0
    x_max_sigmas: float = 12.0
    tail_floor: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0 and self.t_max_bits > 0):
            raise InvalidArgumentError("tolerances and t_max_bits must be positive")
        if self.max_subdivisions < 8:
            # the radial integrals carry five fixed breakpoints
            raise InvalidArgumentError("max_subdivisions must be >= 8")

    def x_max(self, marine: fading.RicianParams) -> float:
        """Upper limit of envelope integrals, ``v + 12 rho`` by default."""
        return marine.v + self.x_max_sigmas * marine.rho


@dataclass(frozen=True)
class LaplaceDerivativeSettings:
    fd_order: int = 4
    rel_step: float = 1e-3
    richardson: bool = True

    def __post_init__(self):
        if self.fd_order not in (2, 4, 6):
            raise InvalidArgumentError("fd_order must be 2, 4 or 6")
        if not 0 < self.rel_step < 0.1:
            raise InvalidArgumentError("rel_step must lie in (0, 0.1)")


_QUAD = QuadratureSettings()
_FD = LaplaceDerivativeSettings()


def _quad(f, a, b, qs: QuadratureSettings, what: str, diag: dict | None = None, points=None):
    if b <= a:
        return 0.0
    pts = None
    if points is not None:
        pts = sorted(p for p in points if a < p < b) or None
    val, err, info, *rest = integrate.quad(
        f, a, b, epsabs=qs.abs_tol, epsrel=qs.rel_tol, limit=qs.max_subdivisions,
        points=pts, full_output=1)
    if rest and err > 10 * max(qs.abs_tol, qs.rel_tol * abs(val)):
        raise NumericFailure(
            f"{what}: quadrature did not converge on [{a}, {b}]",
            {"integral": what, "interval": (a, b), "estimate": val, "abserr": err,
             "neval": info.get("neval"), "message": rest[0]})
    if diag is not None:
        diag[what + "_neval"] = diag.get(what + "_neval", 0) + info.get("neval", 0)
        diag[what + "_abserr"] = max(diag.get(what + "_abserr", 0.0), err)
    return val


# --------------------------------------------------------------------------
# Marine link
# --------------------------------------------------------------------------

def _marine_snr_scale(scenario: Scenario) -> float:
    """Marine SNR per unit envelope power, ``p_bd g_bd R_bd^-alpha_bd / sigma_bd^2``."""
    ln = scenario.link
    return ln.p_bd * ln.g_bd * scenario.r_bd_m ** (-ln.alpha_bd) / ln.sigma2_bd


def _marine_x0(scenario: Scenario) -> float:
    return math.sqrt(scenario.tau_linear / _marine_snr_scale(scenario))


def p_bd(scenario: Scenario, approx: bool = False) -> float:
    """Probability the marine SNR exceeds the threshold.

    ``approx=True`` uses the exponential Marcum-Q fit instead of the series.
    """
    mar = scenario.fading.marine
    q = fading.marcum_q1_approx if approx else fading.marcum_q1
    return float(q(mar.v / mar.rho, _marine_x0(scenario) / mar.rho))


# --------------------------------------------------------------------------
# Interference Laplace transform and its derivatives
# --------------------------------------------------------------------------

def _law(scenario: Scenario) -> geometry.DistanceLaw:
    return geometry.DistanceLaw(scenario.constellation, scenario.r_bd_km)


def _check_ru(scenario: Scenario, r_u_km: float):
    c = scenario.constellation
    if not c.altitude_km * (1 - 1e-12) <= r_u_km <= c.visible_distance_km * (1 + 1e-12):
        raise InvalidArgumentError(
            f"r_u_km must lie in [{c.altitude_km}, {c.visible_distance_km}], got {r_u_km}")


def interference_laplace(scenario: Scenario, r_u_km: float, s, qs: QuadratureSettings = _QUAD,
                         diag: dict | None = None):
    """Laplace transform of noise plus co-channel interference at the ship.

    Returns ``E[exp(-s (beta - delta) (sigma_d^2 + I))]`` given the serving
    distance ``r_u_km``, averaging over a binomial number of visible
    interferers with i.i.d. distances and Shadowed Rician gains.

    Parameters
    ----------
    s : float or array_like
        Threshold-scaled transform argument(s).  Arrays are evaluated in a
        single vector quadrature so that all entries share one subdivision,
        which keeps finite differences across ``s`` free of quadrature noise.
    """
    _check_ru(scenario, r_u_km)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    ln, con, sp = scenario.link, scenario.constellation, scenario.fading.space
    c = sp.decay
    noise = np.exp(-s_arr * c * ln.sigma2_d)
    n_co = con.sats_per_channel - 1
    law = _law(scenario)
    p_i = float(geometry.p_interferer(law, r_u_km))
    r_max = con.visible_distance_km
    if n_co == 0 or p_i == 0.0 or r_u_km >= r_max:
        out = noise
    else:
        km = fading.sr_to_kappa_mu(sp)
        gain = ln.p_i * ln.g_i * c * s_arr

        def integrand(r):
            return fading.kappa_mu_laplace(km, gain * (r * 1000.0) ** (-ln.alpha)) * r

        val, err, info = integrate.quad_vec(
            integrand, r_u_km, r_max, epsabs=qs.abs_tol * (r_max ** 2), epsrel=qs.rel_tol * 1e-3,
            limit=qs.max_subdivisions, full_output=True)
        if not info.success:
            raise NumericFailure("interference integral did not converge",
                                 {"r_u_km": r_u_km, "abserr": float(np.max(err)),
                                  "neval": info.neval, "status": info.status})
        if diag is not None:
            diag["laplace_neval"] = diag.get("laplace_neval", 0) + info.neval
        den = 4 * con.earth_radius_km * con.shell_radius_km - r_u_km ** 2 + con.altitude_km ** 2
        a_norm = 2.0 * val / (den * p_i)
        n = np.arange(n_co + 1)
        w = stats.binom.pmf(n, n_co, p_i)
        out = noise * (w[None, :] * a_norm[:, None] ** n[None, :]).sum(axis=1)
    return float(out[0]) if np.ndim(s) == 0 else out


def _central_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative on integer offsets."""
    k = np.asarray(offsets, dtype=float)
    vander = np.vander(k, increasing=True).T
    rhs = np.zeros(len(k))
    rhs[order] = math.factorial(order)
    return np.linalg.solve(vander, rhs)


def _stencil(order: int, fd_order: int) -> np.ndarray:
    half = (order + 1) // 2 - 1 + fd_order // 2
    return np.arange(-half, half + 1)


def fd_derivative(f, s0: float, order: int, step: float,
                  settings: LaplaceDerivativeSettings = _FD) -> float:
    """Central finite-difference derivative of a vectorised ``f`` at ``s0``.

    All stencil points (including the doubled step used for Richardson
    extrapolation) are evaluated in one call to ``f``.
    """
    if order == 0:
        return float(np.atleast_1d(f(np.array([s0])))[0])
    base = _stencil(order, settings.fd_order)
    if settings.richardson:
        offsets = np.union1d(base, 2 * base)
    else:
        offsets = base
    vals = np.atleast_1d(f(s0 + step * offsets))
    lookup = dict(zip(offsets.tolist(), vals))
    d_h = sum(w * lookup[k] for w, k in zip(_central_weights(base, order), base.tolist())) / step ** order
    if not settings.richardson:
        return float(d_h)
    d_2h = sum(w * lookup[2 * k] for w, k in zip(_central_weights(base, order), base.tolist()))
    d_2h /= (2 * step) ** order
    p = settings.fd_order
    return float((2 ** p * d_h - d_2h) / (2 ** p - 1))


def _natural_step(scenario: Scenario, r_u_km: float, s: float, settings: LaplaceDerivativeSettings):
    ln = scenario.link
    scale = 1.0 / (scenario.fading.space.decay
                   * (ln.sigma2_d + ln.p_i * ln.g_i * (r_u_km * 1000.0) ** (-ln.alpha)))
    return settings.rel_step * max(abs(s), scale)


def laplace_derivative(scenario: Scenario, r_u_km: float, s: float, order: int,
                       settings: LaplaceDerivativeSettings = _FD,
                       qs: QuadratureSettings = _QUAD, diag: dict | None = None) -> float:
    """``order``-th derivative of :func:`interference_laplace` in ``s``.

    The step is ``rel_step`` times ``max(|s|, s_nat)`` where ``s_nat`` is the
    reciprocal of the expected per-interferer exponent scale, so the
    stencil stays well conditioned as ``s`` approaches zero.
    """
    m = scenario.fading.space.m
    if not 0 <= order <= max(m - 1, 0):
        raise InvalidArgumentError(f"order must lie in [0, {m - 1}], got {order}")
    step = _natural_step(scenario, r_u_km, s, settings)
    return fd_derivative(lambda x: interference_laplace(scenario, r_u_km, x, qs, diag),
                         s, order, step, settings)


def _derivative_table(scenario, r_u_km, s, settings, qs, diag):
    """Rows ``[L(s), L'(s), ..., L^(m-1)(s)]`` for each entry of ``s``.

    Every stencil point of every ``s`` goes through a single vector
    quadrature, so the quadrature error is a smooth function of ``s`` and
    cancels in the differences.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    m = scenario.fading.space.m
    if m == 1:
        return interference_laplace(scenario, r_u_km, s, qs, diag)[:, None]
    steps = np.array([_natural_step(scenario, r_u_km, x, settings) for x in s])
    stencils = [_stencil(l, settings.fd_order) for l in range(1, m)]
    if settings.richardson:
        offsets = np.unique(np.concatenate([np.union1d(b, 2 * b) for b in stencils] + [[0]]))
    else:
        offsets = np.unique(np.concatenate(stencils + [np.array([0])]))
    grid = s[:, None] + steps[:, None] * offsets[None, :]
    vals = interference_laplace(scenario, r_u_km, grid.ravel(), qs, diag).reshape(grid.shape)
    col = {k: i for i, k in enumerate(offsets.tolist())}
    out = np.empty((len(s), m))
    out[:, 0] = vals[:, col[0]]
    p = settings.fd_order
    for l, base in enumerate(stencils, start=1):
        w = _central_weights(base, l)
        d_h = sum(wk * vals[:, col[k]] for wk, k in zip(w, base.tolist())) / steps ** l
        if settings.richardson:
            d_2h = sum(wk * vals[:, col[2 * k]] for wk, k in zip(w, base.tolist()))
            d_2h = d_2h / (2 * steps) ** l
            d_h = (2 ** p * d_h - d_2h) / (2 ** p - 1)
        out[:, l] = d_h
    return out


# --------------------------------------------------------------------------
# Space link
# --------------------------------------------------------------------------

def uplink_ccdf(scenario: Scenario, r_u_km: float, tau: float | None = None) -> float:
    """Probability the uplink SNR exceeds ``tau`` at serving distance ``r_u_km``."""
    tau = scenario.tau_linear if tau is None else tau
    ln = scenario.link
    if r_u_km > scenario.constellation.visible_distance_km:
        return 0.0
    x = tau * ln.sigma2_u * (r_u_km * 1000.0) ** ln.alpha / (ln.p_u * ln.g_u)
    return float(fading.sr_ccdf(scenario.fading.space, x))


def _downlink_s(scenario: Scenario, r_u_km: float, tau: float) -> float:
    ln = scenario.link
    r_d_m = 1000.0 * math.hypot(r_u_km, scenario.r_bd_km)
    return tau * r_d_m ** ln.alpha / (ln.p_d * ln.g_d)


def downlink_ccdf(scenario: Scenario, r_u_km: float, tau=None,
                  settings: LaplaceDerivativeSettings = _FD, qs: QuadratureSettings = _QUAD,
                  diag: dict | None = None):
    """Probability the downlink SINR exceeds ``tau`` given the serving distance.

    Averages the Shadowed Rician CCDF over noise plus interference through
    the Laplace transform and its derivatives.  ``tau`` may be an array.
    """
    tau_in = scenario.tau_linear if tau is None else tau
    taus = np.atleast_1d(np.asarray(tau_in, dtype=float))
    sp = scenario.fading.space
    s = _downlink_s(scenario, r_u_km, 1.0) * taus
    table = _derivative_table(scenario, r_u_km, s, settings, qs, diag)
    c = sp.decay
    out = np.empty(len(s))
    for i, si in enumerate(s):
        terms = [coeff * c ** (-(n + 1)) * (-si) ** l * table[i, l]
                 for n, l, coeff in fading.sr_series(sp) if not (l and si == 0.0)]
        out[i] = sp.mu * math.fsum(terms)
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if np.ndim(tau_in) == 0 else out


def p_esd_given_ru(scenario: Scenario, r_u_km: float, settings=_FD, qs=_QUAD, diag=None) -> float:
    up = uplink_ccdf(scenario, r_u_km)
    if up == 0.0:
        return 0.0
    return up * downlink_ccdf(scenario, r_u_km, None, settings, qs, diag)


def _ru_breakpoints(scenario: Scenario):
    law = _law(scenario)
    # Quantiles of the nearest-distance law help the outer quadrature find the peak.
    us = np.array([0.1, 0.5, 0.9, 0.99, 0.9999])
    return list(np.atleast_1d(geometry.sample_ru(law, None, u=us)))


def p_esd(scenario: Scenario, settings=_FD, qs=_QUAD, diag: dict | None = None) -> float:
    """Probability both satellite hops clear the threshold.

    Integrates over the serving distance up to the visible distance; a
    constellation with no visible satellite contributes nothing.
    """
    con = scenario.constellation
    law = _law(scenario)
    val = _quad(lambda r: p_esd_given_ru(scenario, r, settings, qs, diag) * geometry.ru_pdf(law, r),
                con.altitude_km, con.visible_distance_km, qs, "p_esd", diag,
                points=_ru_breakpoints(scenario))
    return float(np.clip(val, 0.0, 1.0))


def p_s(scenario: Scenario, settings=_FD, qs=_QUAD, diag=None) -> float:
    pb = p_bd(scenario)
    return pb + (1.0 - pb) * p_esd(scenario, settings, qs, diag)


# --------------------------------------------------------------------------
# Capacity
# --------------------------------------------------------------------------

def c_bd(scenario: Scenario, qs: QuadratureSettings = _QUAD, diag=None) -> float:
    """Marine-link ergodic rate restricted to envelopes above the threshold."""
    mar = scenario.fading.marine
    gamma = _marine_snr_scale(scenario)
    x0, x_max = _marine_x0(scenario), qs.x_max(mar)
    val = _quad(lambda x: math.log2(1.0 + gamma * x * x) * fading.rician_pdf(mar, x),
                x0, x_max, qs, "c_bd", diag, points=[mar.v])
    return scenario.link.b_bd * val


def c_marine(scenario: Scenario, qs: QuadratureSettings = _QUAD, diag=None) -> float:
    """Ergodic rate of a marine-only system that never switches links."""
    mar = scenario.fading.marine
    gamma = _marine_snr_scale(scenario)
    val = _quad(lambda x: math.log2(1.0 + gamma * x * x) * fading.rician_pdf(mar, x),
                0.0, qs.x_max(mar), qs, "c_marine", diag, points=[mar.v])
    return scenario.link.b_bd * val


def marine_failure_mass(scenario: Scenario) -> float:
    """Probability mass of envelopes below the threshold (``1 - p_bd``)."""
    return float(fading.rician_cdf(scenario.fading.marine, _marine_x0(scenario)))


def _t_upper(scenario: Scenario, r_u_km: float, qs: QuadratureSettings) -> float:
    """Bits beyond which even the interference-free downlink CCDF is negligible."""
    sp, ln = scenario.fading.space, scenario.link
    x_tail = optimize.brentq(lambda x: fading.sr_ccdf(sp, x) - qs.tail_floor, 0.0, 1e3)
    snr_per_gain = 1.0 / (ln.sigma2_d * _downlink_s(scenario, r_u_km, 1.0))
    return min(qs.t_max_bits, math.log2(1.0 + x_tail * snr_per_gain))


def space_capacity_given_ru(scenario: Scenario, r_u_km: float, settings=_FD, qs=_QUAD,
                            diag=None) -> float:
    """Ergodic downlink spectral efficiency (bit/s/Hz) at serving distance ``r_u_km``.

    The rate integrand is smooth in ``t``, so it is integrated with a pair of
    Gauss-Legendre rules evaluated in one vector pass; their difference is
    the error estimate.  If it exceeds tolerance the adaptive scalar
    quadrature is used instead.
    """
    t_hi = _t_upper(scenario, r_u_km, qs)
    (x1, w1), (x2, w2) = _GL_PAIR
    t = 0.5 * t_hi * (np.concatenate([x1, x2]) + 1.0)
    ccdf = downlink_ccdf(scenario, r_u_km, 2.0 ** t - 1.0, settings, qs, diag)
    lo = 0.5 * t_hi * float(w1 @ ccdf[:len(x1)])
    hi = 0.5 * t_hi * float(w2 @ ccdf[len(x1):])
    if abs(hi - lo) <= max(qs.abs_tol, qs.rel_tol * abs(hi)):
        if diag is not None:
            diag["c_esd_t_gl_err"] = max(diag.get("c_esd_t_gl_err", 0.0), abs(hi - lo))
        return hi
    return _quad(lambda x: downlink_ccdf(scenario, r_u_km, 2.0 ** x - 1.0, settings, qs, diag),
                 0.0, t_hi, qs, "c_esd_t", diag)


_GL_PAIR = (np.polynomial.legendre.leggauss(40), np.polynomial.legendre.leggauss(64))


def c_esd(scenario: Scenario, settings=_FD, qs=_QUAD, diag=None) -> float:
    """Satellite-relay rate weighted by the probability the marine link fails.

    The envelope integral factorises from the distance and rate integrals,
    so it reduces to the Rician CDF at the threshold envelope.
    """
    mass = marine_failure_mass(scenario)
    if mass == 0.0:
        return 0.0
    con = scenario.constellation
    law = _law(scenario)
    inner = _quad(lambda r: space_capacity_given_ru(scenario, r, settings, qs, diag)
                  * geometry.ru_pdf(law, r),
                  con.altitude_km, con.visible_distance_km, qs, "c_esd_r", diag,
                  points=_ru_breakpoints(scenario))
    return scenario.link.b_esd * mass * inner


def c_s(scenario: Scenario, settings=_FD, qs=_QUAD, diag=None) -> float:
    return c_bd(scenario, qs, diag) + c_esd(scenario, settings, qs, diag)


def switch_radius_km(scenario: Scenario) -> float:
    """Largest marine distance at which an unfaded marine link meets the threshold."""
    ln = scenario.link
    r_m = (ln.p_bd * ln.g_bd / (scenario.tau_linear * ln.sigma2_bd)) ** (1.0 / ln.alpha_bd)
    return r_m / 1000.0


def c_s_awgn_limit(scenario: Scenario, settings=_FD, qs=_QUAD, diag=None) -> float:
    """Capacity when the marine link has no diffuse fading.

    The marine link carries everything up to :func:`switch_radius_km`
    (inclusive) and nothing beyond, where the satellite relay takes over.
    """
    if scenario.r_bd_km <= switch_radius_km(scenario):
        return scenario.link.b_bd * math.log2(1.0 + _marine_snr_scale(scenario))
    con = scenario.constellation
    law = _law(scenario)
    inner = _quad(lambda r: space_capacity_given_ru(scenario, r, settings, qs, diag)
                  * geometry.ru_pdf(law, r),
                  con.altitude_km, con.visible_distance_km, qs, "c_esd_r", diag,
                  points=_ru_breakpoints(scenario))
    return scenario.link.b_esd * inner


# --------------------------------------------------------------------------
# Bundle
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoryResult:
    p_bd: float
    p_esd: float
    p_s: float
    c_bd: float = float("nan")
    c_esd: float = float("nan")
    c_s: float = float("nan")
    diagnostics: dict = field(default_factory=dict)


def evaluate(scenario: Scenario, capacity: bool = True, settings=_FD, qs=_QUAD) -> TheoryResult:
    """Evaluate success probabilities and, optionally, capacities for one scenario."""
    diag: dict = {}
    t0 = time.perf_counter()
    pb = p_bd(scenario)
    pe = p_esd(scenario, settings, qs, diag)
    diag["elapsed_p_s"] = time.perf_counter() - t0
    ps = pb + (1.0 - pb) * pe
    if not capacity:
        return TheoryResult(pb, pe, ps, diagnostics=diag)
    t1 = time.perf_counter()
    cb = c_bd(scenario, qs, diag)
    ce = c_esd(scenario, settings, qs, diag)
    diag["elapsed_c_s"] = time.perf_counter() - t1
    return TheoryResult(pb, pe, ps, cb, ce, cb + ce, diag)
