"""
Fading laws for the marine and space links.

The marine link is Rician (envelope), the space link is Shadowed Rician
(power gain) with integer Nakagami parameter ``m``.  Interferer power gains
use the kappa-mu form of the Shadowed Rician Laplace transform.

All samplers take an explicit :class:`numpy.random.Generator`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import InvalidArgumentError

__all__ = [
    "RicianParams",
    "ShadowedRicianParams",
    "KappaMuParams",
    "FadingSpec",
    "marcum_q1",
    "marcum_q1_approx",
    "rician_cdf",
    "rician_pdf",
    "sample_rician",
    "sr_ccdf",
    "sr_cdf",
    "sr_pdf",
    "sr_series",
    "sample_sr",
    "sr_to_kappa_mu",
    "kappa_mu_laplace",
]


# --------------------------------------------------------------------------
# Parameter records
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RicianParams:
    """Rician envelope with unit mean power, parameterised by its K-factor."""

    k_factor: float

    def __post_init__(self):
        if not (math.isfinite(self.k_factor) and self.k_factor >= 0):
            raise InvalidArgumentError(f"k_factor must be >= 0, got {self.k_factor}")

    @property
    def v(self) -> float:
        """LOS amplitude."""
        return math.sqrt(2 * self.k_factor / (2 * self.k_factor + 2))

    @property
    def rho(self) -> float:
        """Per-dimension standard deviation of the diffuse component."""
        return math.sqrt(1 / (2 * self.k_factor + 2))


@dataclass(frozen=True)
class ShadowedRicianParams:
    """Shadowed Rician power-gain law SR(b, m, omega).

    Parameters
    ----------
    b : float
        Half the average power of the multipath component.
    m : int
        Nakagami shadowing parameter; only positive integers are supported
        because the closed-form CDF is a finite double sum.
    omega : float
        Average power of the LOS component.
    """

    b: float
    m: int
    omega: float

    def __post_init__(self):
        if not self.b > 0:
            raise InvalidArgumentError(f"b must be > 0, got {self.b}")
        if isinstance(self.m, bool) or int(self.m) != self.m or self.m < 1:
            raise InvalidArgumentError(
                f"m must be a positive integer for the finite-sum SR law, got {self.m}")
        object.__setattr__(self, "m", int(self.m))
        if not self.omega > 0:
            raise InvalidArgumentError(f"omega must be > 0, got {self.omega}")

    @property
    def mu(self) -> float:
        b, m, om = self.b, self.m, self.omega
        return (1 / (2 * b)) * (2 * b * m / (2 * b * m + om)) ** m

    @property
    def delta(self) -> float:
        b, m, om = self.b, self.m, self.omega
        return (1 / (2 * b)) * (om / (2 * b * m + om))

    @property
    def beta(self) -> float:
        return 1 / (2 * self.b)

    @property
    def decay(self) -> float:
        """``beta - delta``, the exponential rate shared by every series term."""
        return self.beta - self.delta

    @property
    def mean(self) -> float:
        return 2 * self.b + self.omega


@dataclass(frozen=True)
class KappaMuParams:
    kappa: float
    mu: float
    m: int
    h_bar: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise InvalidArgumentError(f"kappa must be > 0, got {self.kappa}")
        if self.mu != 1:
            raise InvalidArgumentError("only the mu = 1 (Shadowed Rician) case is supported")


@dataclass(frozen=True)
class FadingSpec:
    """Marine (Rician) and space (Shadowed Rician) fading of one scenario."""

    marine: RicianParams = field(default_factory=lambda: RicianParams(10.0))
    space: ShadowedRicianParams = field(
        default_factory=lambda: ShadowedRicianParams(0.3, 3, 0.4))

    @property
    def kappa_mu(self) -> KappaMuParams:
        return sr_to_kappa_mu(self.space)


# --------------------------------------------------------------------------
# Marcum Q
# --------------------------------------------------------------------------

_CHUNK = 4096


def _marcum_q1_scalar(a: float, b: float) -> float:
    """Scalar twin of :func:`_marcum_q1_block` in plain floats."""
    z = a * b
    upper = b >= a
    r = a / b if upper else b / a
    y_next, y, total = 0.0, 1e-280, 0.0
    for k in range(int(12.0 * math.sqrt(z) + 60.0), 0, -1):
        total += r ** k * y
        y, y_next = y_next + (2.0 * k / z) * y, y
        if y > 1e250:
            y, y_next, total = y * 1e-250, y_next * 1e-250, total * 1e-250
    if upper:
        total += y
    series = math.exp(-0.5 * (a - b) ** 2) * total * float(special.i0e(z)) / y
    return series if upper else 1.0 - series


def _marcum_q1_block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Neumann series for 1-d arrays with ``a, b > 0``.

    With ``r = min(a, b) / max(a, b)`` the series is ``sum r^k I_k(ab)``,
    taken from ``k = 0`` when ``b >= a`` and from ``k = 1`` (as a
    complement) otherwise.  The Bessel orders come from Miller's backward
    recurrence normalised by ``I_0``, so only one Bessel call is needed.
    """
    z = a * b
    upper = b >= a
    r = np.where(upper, a / b, b / a)
    # I_k(z) / I_0(z) ~ exp(-k^2 / 2z), so 12 sqrt(z) + 60 orders push the
    # tail below double precision.
    kmax = int(12.0 * math.sqrt(float(z.max())) + 60.0)
    y_next = np.zeros_like(z)
    y = np.full_like(z, 1e-280)
    total = np.zeros_like(z)
    for k in range(kmax, 0, -1):
        total += r ** k * y
        y, y_next = y_next + (2.0 * k / z) * y, y
        big = y > 1e250
        if big.any():
            y[big] *= 1e-250
            y_next[big] *= 1e-250
            total[big] *= 1e-250
    total = np.where(upper, total + y, total) * (special.i0e(z) / y)
    series = np.exp(-0.5 * (a - b) ** 2) * total
    return np.where(upper, series, 1.0 - series)


def marcum_q1(a, b):
    """First-order Marcum Q-function.

    Evaluated by the Neumann series in modified Bessel functions, summing
    ``(a/b)^k I_k(ab)`` when ``b >= a`` and the complementary series in
    ``(b/a)^k`` otherwise.  Exponentially scaled Bessel values keep every
    term finite for large arguments.

    Parameters
    ----------
    a, b : float or array_like
        Non-negative arguments; broadcast against each other.

    Returns
    -------
    float or ndarray
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
        raise InvalidArgumentError("marcum_q1 arguments must be finite")
    if np.any(a_arr < 0) or np.any(b_arr < 0):
        raise InvalidArgumentError("marcum_q1 arguments must be non-negative")
    if a_arr.ndim == 0 and b_arr.ndim == 0:
        a0, b0 = float(a_arr), float(b_arr)
        if b0 == 0.0:
            return 1.0
        if a0 == 0.0:
            return math.exp(-0.5 * b0 * b0)
        return _marcum_q1_scalar(a0, b0)
    a_b, b_b = np.broadcast_arrays(a_arr, b_arr)
    a_f, b_f = a_b.ravel(), b_b.ravel()
    out = np.empty(a_f.shape)
    out[b_f == 0] = 1.0
    edge = (a_f == 0) & (b_f > 0)
    out[edge] = np.exp(-0.5 * b_f[edge] ** 2)
    idx = np.flatnonzero((a_f > 0) & (b_f > 0))
    for lo in range(0, idx.size, _CHUNK):
        sel = idx[lo:lo + _CHUNK]
        out[sel] = _marcum_q1_block(a_f[sel], b_f[sel])
    out = out.reshape(a_b.shape)
    return float(out) if out.ndim == 0 else out


_MU1 = (2.174, -0.592, 0.593, -0.092, 0.005)
_NU1 = (-0.840, 0.327, -0.740, 0.083, -0.004)


def _quartic(coeffs, a):
    return coeffs[0] + a * (coeffs[1] + a * (coeffs[2] + a * (coeffs[3] + a * coeffs[4])))


def marcum_q1_approx(a, b):
    """Closed-form exponential approximation ``exp(-e^{nu1(a)} b^{mu1(a)})``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise InvalidArgumentError("marcum_q1_approx arguments must be non-negative")
    out = np.exp(-np.exp(_quartic(_NU1, a)) * b ** _quartic(_MU1, a))
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Rician (marine link envelope)
# --------------------------------------------------------------------------

def rician_cdf(p: RicianParams, x, approx: bool = False):
    """CDF of the Rician envelope, ``1 - Q1(v/rho, x/rho)``.

    ``approx=True`` swaps the exact Marcum Q for the exponential fit.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidArgumentError("envelope must be non-negative")
    q = marcum_q1_approx if approx else marcum_q1
    return 1.0 - q(p.v / p.rho, x / p.rho)


def rician_pdf(p: RicianParams, x):
    x = np.asarray(x, dtype=float)
    v, rho2 = p.v, p.rho ** 2
    # exp(-(x^2+v^2)/2rho^2) I0(xv/rho^2) == exp(-(x-v)^2/2rho^2) i0e(xv/rho^2)
    out = np.where(
        x >= 0,
        x / rho2 * np.exp(-((x - v) ** 2) / (2 * rho2)) * special.i0e(x * v / rho2),
        0.0,
    )
    return float(out) if out.ndim == 0 else out


def sample_rician(p: RicianParams, rng: np.random.Generator, size=None):
    g = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return np.abs(p.v + p.rho * g)


# --------------------------------------------------------------------------
# Shadowed Rician (space link power gain)
# --------------------------------------------------------------------------

def sr_series(p: ShadowedRicianParams):
    """Coefficients of the finite double sum behind the SR CCDF.

    Returns a list of ``(n, l, d_n * n!/l!)`` with
    ``d_n = (1-m)_n (-delta)^n / (n!)^2``.  The CCDF is then
    ``mu * sum c * x^l e^{-(beta-delta) x} (beta-delta)^{-(n+1-l)}``.
    """
    out = []
    for n in range(p.m):
        d_n = special.poch(1 - p.m, n) * (-p.delta) ** n / math.factorial(n) ** 2
        for l in range(n + 1):
            out.append((n, l, d_n * math.factorial(n) / math.factorial(l)))
    return out


def sr_ccdf(p: ShadowedRicianParams, x):
    """Complementary CDF ``P(|H|^2 > x)`` of the Shadowed Rician power gain."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidArgumentError("power gain must be non-negative")
    c = p.decay
    total = np.zeros_like(x)
    for n, l, coeff in sr_series(p):
        total = total + coeff * x ** l * c ** (-(n + 1 - l))
    out = p.mu * total * np.exp(-c * x)
    return float(out) if out.ndim == 0 else out


def sr_cdf(p: ShadowedRicianParams, x):
    return 1.0 - sr_ccdf(p, x)


def sr_pdf(p: ShadowedRicianParams, x):
    x = np.asarray(x, dtype=float)
    c = p.decay
    total = np.zeros_like(x)
    for k in range(p.m):
        zeta = (-1) ** k * special.poch(1 - p.m, k) * p.delta ** k / math.factorial(k) ** 2
        total = total + zeta * x ** k
    out = np.where(x >= 0, p.mu * total * np.exp(-c * x), 0.0)
    return float(out) if out.ndim == 0 else out


def sample_sr(p: ShadowedRicianParams, rng: np.random.Generator, size=None):
    """Draw SR power gains as a Gaussian diffuse part plus Gamma-shadowed LOS."""
    xi = rng.gamma(p.m, p.omega / p.m, size)
    theta = rng.uniform(0.0, 2 * np.pi, size)
    diffuse = math.sqrt(p.b) * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
    return np.abs(diffuse + np.sqrt(xi) * np.exp(1j * theta)) ** 2


def sr_to_kappa_mu(p: ShadowedRicianParams) -> KappaMuParams:
    return KappaMuParams(kappa=p.omega / (2 * p.b), mu=1.0, m=p.m, h_bar=2 * p.b + p.omega)


def kappa_mu_laplace(p: KappaMuParams, s):
    """Laplace transform ``E[exp(-s h)]`` of a mu = 1 kappa-mu power gain.

    ``s`` is the full transform argument; callers fold any path loss,
    power and ``beta - delta`` scaling into it.  Small negative ``s`` is
    accepted (the transform is analytic there), which finite-difference
    stencils centred near zero rely on.
    """
    s = np.asarray(s, dtype=float)
    k, m, h = p.kappa, p.m, p.h_bar
    out = (1 + h * s / (1 + k)) ** (m - 1) * (1 + (k + m) * h * s / ((1 + k) * m)) ** (-m)
    return float(out) if out.ndim == 0 else out
