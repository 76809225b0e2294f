"""
Scenario records, unit conversions and instantaneous link budgets.

Lengths are stored in kilometres.  Every path-loss term ``R^-alpha`` is
evaluated with ``R`` in metres; the conversion happens inside the budget
functions, which take metre arguments explicitly (``*_m``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError
from .fading import FadingSpec, RicianParams, ShadowedRicianParams

__all__ = [
    "NMILE_KM",
    "EARTH_RADIUS_KM",
    "unit_convert",
    "ConstellationSpec",
    "LinkBudget",
    "Scenario",
    "BeamPattern",
    "snr_marine",
    "snr_uplink",
    "sinr_downlink",
    "interference_sum",
    "antenna_gain",
    "default_link_budget",
    "default_scenario",
]

NMILE_KM = 1.852
EARTH_RADIUS_KM = 6371.0

_KINDS = ("db->linear", "linear->db", "dbm->watts", "watts->dbm", "dbi->linear",
          "nmile->km", "km->nmile", "psd_bw->watts")


def unit_convert(value, kind: str, bandwidth_hz: float | None = None):
    """Convert a scalar between the units used in link budgets.

    Parameters
    ----------
    value : float
        Quantity to convert.  For ``"psd_bw->watts"`` this is a noise power
        spectral density in dBm/Hz.
    kind : str
        One of ``db->linear``, ``linear->db``, ``dbm->watts``, ``watts->dbm``,
        ``dbi->linear``, ``nmile->km``, ``km->nmile``, ``psd_bw->watts``.
        The arrow may also be written as a unicode arrow or ``_to_``.
    bandwidth_hz : float, optional
        Required for ``psd_bw->watts``.

    Examples
    --------
    >>> unit_convert(0.0, "db->linear")
    1.0
    >>> round(unit_convert(40, "nmile->km"), 2)
    74.08
    """
    kind = kind.replace("→", "->").replace("_to_", "->").lower()
    if kind not in _KINDS:
        raise InvalidArgumentError(f"unknown conversion {kind!r}; expected one of {_KINDS}")
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgumentError(f"cannot convert non-finite value {value}")
    if kind in ("db->linear", "dbi->linear"):
        return 10.0 ** (value / 10.0)
    if kind == "linear->db":
        if value <= 0:
            raise InvalidArgumentError("linear value must be positive to express in dB")
        return 10.0 * math.log10(value)
    if kind == "dbm->watts":
        return 10.0 ** (value / 10.0) / 1000.0
    if kind == "watts->dbm":
        if value <= 0:
            raise InvalidArgumentError("power must be positive to express in dBm")
        return 10.0 * math.log10(value * 1000.0)
    if kind == "nmile->km":
        return value * NMILE_KM
    if kind == "km->nmile":
        return value / NMILE_KM
    # psd_bw->watts
    if bandwidth_hz is None or not (math.isfinite(bandwidth_hz) and bandwidth_hz > 0):
        raise InvalidArgumentError("psd_bw->watts needs a positive finite bandwidth_hz")
    return 10.0 ** (value / 10.0) / 1000.0 * bandwidth_hz


# --------------------------------------------------------------------------
# Records
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstellationSpec:
    """``n_sats`` satellites on one shell, sharing ``n_channels`` channels."""

    n_sats: int
    n_channels: int
    altitude_km: float
    earth_radius_km: float = EARTH_RADIUS_KM

    def __post_init__(self):
        if int(self.n_sats) != self.n_sats or self.n_sats < 1:
            raise InvalidArgumentError(f"n_sats must be a positive integer, got {self.n_sats}")
        if int(self.n_channels) != self.n_channels or not 1 <= self.n_channels <= self.n_sats:
            raise InvalidArgumentError(
                f"n_channels must be an integer in [1, n_sats], got {self.n_channels}")
        if self.n_sats % self.n_channels:
            raise InvalidArgumentError(
                f"n_sats ({self.n_sats}) must be divisible by n_channels ({self.n_channels})")
        if not self.altitude_km > 0:
            raise InvalidArgumentError(f"altitude_km must be > 0, got {self.altitude_km}")
        if not self.earth_radius_km > 0:
            raise InvalidArgumentError("earth_radius_km must be > 0")
        object.__setattr__(self, "n_sats", int(self.n_sats))
        object.__setattr__(self, "n_channels", int(self.n_channels))

    @property
    def shell_radius_km(self) -> float:
        return self.earth_radius_km + self.altitude_km

    @property
    def visible_distance_km(self) -> float:
        """Largest ground-to-satellite distance with the satellite above the horizon."""
        return math.sqrt(2 * self.earth_radius_km * self.altitude_km + self.altitude_km ** 2)

    @property
    def sats_per_channel(self) -> int:
        return self.n_sats // self.n_channels


@dataclass(frozen=True)
class LinkBudget:
    """Powers (W), linear gains, path-loss exponents, noise powers (W), bandwidths (Hz).

    Suffixes: ``bd`` marine link, ``u`` uplink to the serving satellite,
    ``d`` downlink from it, ``i`` each interfering satellite.
    """

    p_bd: float
    p_u: float
    p_d: float
    p_i: float
    g_bd: float
    g_u: float
    g_d: float
    g_i: float
    alpha_bd: float
    alpha: float
    sigma2_bd: float
    sigma2_u: float
    sigma2_d: float
    b_bd: float
    b_esd: float

    def __post_init__(self):
        for name in ("p_bd", "p_u", "p_d", "p_i", "g_bd", "g_u", "g_d", "g_i",
                     "sigma2_bd", "sigma2_u", "sigma2_d", "b_bd", "b_esd"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise InvalidArgumentError(f"{name} must be positive and finite, got {val}")
        for name in ("alpha_bd", "alpha"):
            val = getattr(self, name)
            if not 1 < val <= 6:
                raise InvalidArgumentError(f"{name} must lie in (1, 6], got {val}")


@dataclass(frozen=True)
class Scenario:
    """One evaluation point: geometry, budget, fading, BS-to-ship distance, threshold."""

    constellation: ConstellationSpec
    link: LinkBudget
    fading: FadingSpec = field(default_factory=FadingSpec)
    r_bd_km: float = 40 * NMILE_KM
    tau_linear: float = 10.0

    def __post_init__(self):
        if not (math.isfinite(self.r_bd_km) and self.r_bd_km > 0):
            raise InvalidArgumentError(f"r_bd_km must be > 0, got {self.r_bd_km}")
        if not (math.isfinite(self.tau_linear) and self.tau_linear > 0):
            raise InvalidArgumentError(f"tau_linear must be > 0, got {self.tau_linear}")

    @property
    def tau_db(self) -> float:
        return 10.0 * math.log10(self.tau_linear)

    @property
    def r_bd_m(self) -> float:
        return self.r_bd_km * 1000.0

    def with_tau_db(self, tau_db: float) -> "Scenario":
        return replace(self, tau_linear=10.0 ** (tau_db / 10.0))

    def with_link(self, **changes) -> "Scenario":
        return replace(self, link=replace(self.link, **changes))

    def with_constellation(self, **changes) -> "Scenario":
        return replace(self, constellation=replace(self.constellation, **changes))

    def with_fading(self, marine: RicianParams | None = None,
                    space: ShadowedRicianParams | None = None) -> "Scenario":
        return replace(self, fading=FadingSpec(marine=marine or self.fading.marine,
                                               space=space or self.fading.space))


@dataclass(frozen=True)
class BeamPattern:
    """Two-level satellite antenna pattern: main lobe inside ``phi_th_rad``."""

    phi_th_rad: float
    g_main: float
    g_side: float

    def __post_init__(self):
        if not 0 < self.phi_th_rad < math.pi:
            raise InvalidArgumentError(f"phi_th_rad must lie in (0, pi), got {self.phi_th_rad}")
        if not (self.g_main > 0 and self.g_side > 0):
            raise InvalidArgumentError("beam gains must be positive")


# --------------------------------------------------------------------------
# Link budgets.  Distances in metres.
# --------------------------------------------------------------------------

def snr_marine(link: LinkBudget, h_bd, r_bd_m):
    """Marine-link SNR for envelope ``h_bd`` at distance ``r_bd_m`` metres."""
    h_bd = np.asarray(h_bd, dtype=float)
    r = np.asarray(r_bd_m, dtype=float)
    if np.any(r <= 0):
        raise InvalidArgumentError("r_bd_m must be > 0 (path loss is singular at 0)")
    if np.any(h_bd < 0):
        raise InvalidArgumentError("h_bd must be >= 0")
    out = link.p_bd * link.g_bd * h_bd ** 2 * r ** (-link.alpha_bd) / link.sigma2_bd
    return float(out) if out.ndim == 0 else out


def snr_uplink(link: LinkBudget, spec: ConstellationSpec, h_u2, r_u_m):
    """Uplink SNR at the serving satellite; zero once it is below the horizon."""
    h_u2 = np.asarray(h_u2, dtype=float)
    r = np.asarray(r_u_m, dtype=float)
    if np.any(r <= 0) or np.any(h_u2 < 0):
        raise InvalidArgumentError("snr_uplink needs r_u_m > 0 and h_u2 >= 0")
    snr = link.p_u * link.g_u * h_u2 * r ** (-link.alpha) / link.sigma2_u
    out = np.where(r <= spec.visible_distance_km * 1000.0, snr, 0.0)
    return float(out) if out.ndim == 0 else out


def sinr_downlink(link: LinkBudget, h_d2, r_d_m, interference_w=0.0):
    h_d2 = np.asarray(h_d2, dtype=float)
    r = np.asarray(r_d_m, dtype=float)
    i_w = np.asarray(interference_w, dtype=float)
    if np.any(r <= 0) or np.any(i_w < 0):
        raise InvalidArgumentError("sinr_downlink needs r_d_m > 0 and interference_w >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = link.p_d * link.g_d * h_d2 * r ** (-link.alpha) / (link.sigma2_d + i_w)
    out = np.where(np.isinf(i_w), 0.0, out)
    return float(out) if out.ndim == 0 else out


def interference_sum(link: LinkBudget, interferers) -> float:
    """Aggregate received interference power (W) from ``(h_j2, r_j_m)`` pairs.

    Uses exactly rounded summation, so the result does not depend on the
    order of ``interferers``.
    """
    terms = []
    for h2, r in interferers:
        if r <= 0:
            raise InvalidArgumentError("interferer distance must be > 0")
        terms.append(link.p_i * link.g_i * h2 * r ** (-link.alpha))
    return math.fsum(terms)


def antenna_gain(pattern: BeamPattern, phi_rad):
    phi = np.asarray(phi_rad, dtype=float)
    out = np.where(np.abs(phi) <= pattern.phi_th_rad, pattern.g_main, pattern.g_side)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Reference parameter set
# --------------------------------------------------------------------------

def default_link_budget() -> LinkBudget:
    return LinkBudget(
        p_bd=80.0, p_u=25.0, p_d=10.0, p_i=10.0,
        g_bd=unit_convert(2.0, "dbi->linear"),
        g_u=unit_convert(48.0, "dbi->linear"),
        g_d=unit_convert(38.5, "dbi->linear"),
        g_i=unit_convert(28.5, "dbi->linear"),
        alpha_bd=2.9, alpha=2.4,
        sigma2_bd=unit_convert(-100.0, "dbm->watts"),
        sigma2_u=unit_convert(-90.0, "dbm->watts"),
        sigma2_d=unit_convert(-90.0, "dbm->watts"),
        b_bd=30e6, b_esd=250e6,
    )


def default_scenario(**overrides) -> Scenario:
    """Reference scenario: N = 1000, K = 10, 1200 km, 40 n miles, 10 dB.

    Keyword overrides: ``n_sats``, ``n_channels``, ``altitude_km``,
    ``r_bd_nmile``, ``tau_db``, ``k_rician``.
    """
    n_sats = overrides.pop("n_sats", 1000)
    n_channels = overrides.pop("n_channels", 10)
    altitude_km = overrides.pop("altitude_km", 1200.0)
    r_bd_nmile = overrides.pop("r_bd_nmile", 40.0)
    tau_db = overrides.pop("tau_db", 10.0)
    k_rician = overrides.pop("k_rician", 10.0)
    if overrides:
        raise InvalidArgumentError(f"unknown overrides {sorted(overrides)}")
    return Scenario(
        constellation=ConstellationSpec(n_sats, n_channels, altitude_km),
        link=default_link_budget(),
        fading=FadingSpec(RicianParams(k_rician), ShadowedRicianParams(0.3, 3, 0.4)),
        r_bd_km=unit_convert(r_bd_nmile, "nmile->km"),
        tau_linear=unit_convert(tau_db, "db->linear"),
    )
