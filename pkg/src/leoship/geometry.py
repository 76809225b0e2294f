"""
Constellation sampling and distance laws for a binomial point process on a shell.

Distances here are in kilometres.  Laws measured from the Earth station use
``r_bd_km = 0``; the ship-referenced serving distance ``R_d`` is
approximated by ``sqrt(R_u^2 + R_bd^2)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .model import ConstellationSpec

__all__ = [
    "ShellPoint",
    "DistanceLaw",
    "Constellation",
    "sample_constellation",
    "sample_constellations",
    "ru_cdf",
    "ru_pdf",
    "rj_pdf_given_ru",
    "p_interferer",
    "approx_rd",
    "rd_cdf",
    "rd_pdf",
    "sample_ru",
    "sample_visible_interferer_distance",
    "surface_point",
]


@dataclass(frozen=True)
class ShellPoint:
    unit_vector: tuple
    radius_km: float

    def __post_init__(self):
        u = np.asarray(self.unit_vector, dtype=float)
        if u.shape != (3,) or abs(np.linalg.norm(u) - 1.0) > 1e-12:
            raise InvalidArgumentError("unit_vector must be a 3-vector of unit length")
        object.__setattr__(self, "unit_vector", tuple(float(c) for c in u))

    @property
    def position_km(self) -> np.ndarray:
        return self.radius_km * np.asarray(self.unit_vector)


@dataclass(frozen=True)
class DistanceLaw:
    """Distance distributions for one constellation seen from a ground point.

    ``r_bd_km`` is the Earth-station-to-ship distance entering the serving
    distance approximation; use 0 for laws measured from the Earth station.
    """

    spec: ConstellationSpec
    r_bd_km: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.r_bd_km) and self.r_bd_km >= 0):
            raise InvalidArgumentError(f"r_bd_km must be >= 0, got {self.r_bd_km}")

    @property
    def ru_support(self) -> tuple[float, float]:
        s = self.spec
        return s.altitude_km, 2 * s.earth_radius_km + s.altitude_km

    @property
    def rd_support(self) -> tuple[float, float]:
        lo, hi = self.ru_support
        return math.hypot(lo, self.r_bd_km), math.hypot(hi, self.r_bd_km)


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def _cap_fraction(spec: ConstellationSpec, r2):
    """Fraction of the shell within squared distance ``r2`` of a surface point."""
    return (r2 - spec.altitude_km ** 2) / (4 * spec.earth_radius_km * spec.shell_radius_km)


def ru_cdf(law: DistanceLaw, r_u_km):
    """CDF of the distance from a surface point to the nearest satellite."""
    r = np.asarray(r_u_km, dtype=float)
    frac = np.clip(_cap_fraction(law.spec, r * r), 0.0, 1.0)
    return _out(1.0 - (1.0 - frac) ** law.spec.n_sats)


def ru_pdf(law: DistanceLaw, r_u_km):
    s = law.spec
    r = np.asarray(r_u_km, dtype=float)
    lo, hi = law.ru_support
    inside = (r >= lo) & (r <= hi)
    frac = np.clip(_cap_fraction(s, r * r), 0.0, 1.0)
    dens = r * s.n_sats / (2 * s.earth_radius_km * s.shell_radius_km) * (1.0 - frac) ** (s.n_sats - 1)
    return _out(np.where(inside, dens, 0.0))


def rj_pdf_given_ru(law: DistanceLaw, r_j_km, r_u_km: float):
    """Density of a co-channel satellite's distance given it lies beyond ``r_u_km``."""
    s = law.spec
    lo, hi = law.ru_support
    if not lo <= r_u_km <= hi:
        raise InvalidArgumentError(f"r_u_km must lie in [{lo}, {hi}], got {r_u_km}")
    r = np.asarray(r_j_km, dtype=float)
    den = 4 * s.earth_radius_km * s.shell_radius_km - r_u_km ** 2 + s.altitude_km ** 2
    return _out(np.where((r > r_u_km) & (r <= hi), 2 * r / den, 0.0))


def p_interferer(law: DistanceLaw, r_u_km):
    """Probability that a co-channel satellite beyond ``r_u_km`` is visible.

    Zero at the visible distance and clamped at zero beyond it.
    """
    s = law.spec
    r = np.asarray(r_u_km, dtype=float)
    excess = (r * r - s.altitude_km ** 2) / (2 * s.earth_radius_km)
    p = (s.altitude_km - excess) / (2 * s.shell_radius_km - excess)
    return _out(np.clip(p, 0.0, 1.0))


def approx_rd(r_u_km, r_bd_km):
    return _out(np.hypot(np.asarray(r_u_km, dtype=float), np.asarray(r_bd_km, dtype=float)))


def _shifted(law: DistanceLaw, r_d_km):
    r = np.asarray(r_d_km, dtype=float)
    r2 = r * r - law.r_bd_km ** 2
    return r, np.sqrt(np.maximum(r2, 0.0))


def rd_cdf(law: DistanceLaw, r_d_km):
    """CDF of the approximate serving-satellite-to-ship distance."""
    _, ru = _shifted(law, r_d_km)
    return ru_cdf(law, ru)


def rd_pdf(law: DistanceLaw, r_d_km):
    r, ru = _shifted(law, r_d_km)
    # d/dr of F(sqrt(r^2 - R_bd^2)) = f(ru) * r / ru, and f(ru) / ru has no singularity.
    s = law.spec
    lo, hi = law.rd_support
    frac = np.clip(_cap_fraction(s, ru * ru), 0.0, 1.0)
    dens = r * s.n_sats / (2 * s.earth_radius_km * s.shell_radius_km) * (1.0 - frac) ** (s.n_sats - 1)
    return _out(np.where((r >= lo) & (r <= hi), dens, 0.0))


# --------------------------------------------------------------------------
# Samplers
# --------------------------------------------------------------------------

def sample_ru(law: DistanceLaw, rng: np.random.Generator, size=None, u=None):
    """Inverse-transform draw of the nearest-satellite distance.

    ``u`` may be supplied directly (uniforms in [0, 1]) instead of ``rng``.
    """
    s = law.spec
    if u is None:
        u = rng.random(size)
    u = np.asarray(u, dtype=float)
    # 1 - (1-u)^(1/N) computed as -expm1(log1p(-u)/N) to keep precision for large N.
    with np.errstate(divide="ignore"):
        frac = -np.expm1(np.log1p(-u) / s.n_sats)
    return _out(np.sqrt(s.altitude_km ** 2 + 4 * s.earth_radius_km * s.shell_radius_km * frac))


def sample_visible_interferer_distance(spec: ConstellationSpec, r_u_km, rng: np.random.Generator):
    """Draw distances from the interferer law conditioned on visibility.

    The density ``2r / const`` on ``(r_u, r_max)`` has CDF linear in ``r^2``.
    ``r_u_km`` may be an array, one draw per entry.
    """
    r_u = np.asarray(r_u_km, dtype=float)
    u = rng.random(r_u.shape)
    r_max2 = spec.visible_distance_km ** 2
    return np.sqrt(r_u ** 2 + u * (r_max2 - r_u ** 2))


@dataclass(frozen=True)
class Constellation:
    """Positions (km, shape ``(N, 3)``) and channel labels of one draw."""

    positions_km: np.ndarray
    channels: np.ndarray

    def points(self) -> list[ShellPoint]:
        radius = float(np.linalg.norm(self.positions_km[0]))
        return [ShellPoint(tuple(p / np.linalg.norm(p)), radius) for p in self.positions_km]


def _unit_vectors(rng: np.random.Generator, shape):
    g = rng.standard_normal(shape + (3,))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def _channels(spec: ConstellationSpec, rng: np.random.Generator, batch: tuple):
    keys = rng.random(batch + (spec.n_sats,))
    return np.argsort(np.argsort(keys, axis=-1), axis=-1) // spec.sats_per_channel


def sample_constellation(spec: ConstellationSpec, rng: np.random.Generator) -> Constellation:
    """Place ``N`` satellites uniformly on the shell and split them into channels.

    Each channel receives exactly ``N/K`` satellites, chosen by a uniformly
    random partition.
    """
    pos = spec.shell_radius_km * _unit_vectors(rng, (spec.n_sats,))
    return Constellation(pos, _channels(spec, rng, ()))


def sample_constellations(spec: ConstellationSpec, rng: np.random.Generator, n: int):
    """Batched :func:`sample_constellation`: arrays of shape ``(n, N, 3)`` and ``(n, N)``."""
    pos = spec.shell_radius_km * _unit_vectors(rng, (n, spec.n_sats))
    return pos, _channels(spec, rng, (n,))


def surface_point(spec: ConstellationSpec, arc_km: float) -> np.ndarray:
    """Surface point at great-circle distance ``arc_km`` from the north pole (x-z plane)."""
    theta = arc_km / spec.earth_radius_km
    return spec.earth_radius_km * np.array([math.sin(theta), 0.0, math.cos(theta)])
