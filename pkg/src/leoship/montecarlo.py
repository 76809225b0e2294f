"""
Monte Carlo estimators for the threshold-switched shore-to-ship link.

Two trial types are offered:

``distributional``
    Distances are drawn from their derived laws (nearest-satellite distance,
    binomial interferer count, interferer distances), which is cheap enough
    for millions of trials.
``positional``
    Every trial places the whole constellation on the shell and measures
    true distances, which checks the distance laws themselves.

Trials are grouped into fixed-size blocks.  Block ``b`` draws from its own
counter-based stream ``Philox(SeedSequence(seed, spawn_key=(b,)))`` and block
totals are combined in block order, so results do not depend on how many
worker processes are used.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import fading, geometry
from .errors import InvalidArgumentError
from .model import Scenario

__all__ = [
    "TrialPlan",
    "EstimateRow",
    "RdDistribution",
    "PositionalSample",
    "block_rng",
    "proportion_halfwidth",
    "sample_positional",
    "run",
    "run_distributional",
    "run_positional",
    "empirical_rd_distribution",
]

MODES = ("distributional", "positional")
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class TrialPlan:
    """What to simulate: mode, trial count, seed, scenario and block size."""

    mode: str
    n_trials: int
    seed: int
    scenario: Scenario
    block_size: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidArgumentError(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise InvalidArgumentError(f"n_trials must be a positive integer, got {self.n_trials}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InvalidArgumentError("seed must fit in 64 unsigned bits")
        if self.block_size is None:
            object.__setattr__(self, "block_size",
                               65536 if self.mode == "distributional" else 256)
        if self.block_size < 1:
            raise InvalidArgumentError("block_size must be >= 1")

    def blocks(self) -> list[tuple[int, int]]:
        """``(block_index, trials_in_block)`` in order."""
        full, rest = divmod(self.n_trials, self.block_size)
        out = [(b, self.block_size) for b in range(full)]
        if rest:
            out.append((full, rest))
        return out


@dataclass(frozen=True)
class EstimateRow:
    """Monte Carlo estimates with 95% half-widths.

    ``c_s_hat`` uses the smaller of the uplink and downlink SNRs when the
    satellite relay is used; ``c_esd_dl_hat`` is the relay part computed
    from the downlink alone.  ``c_marine_hat`` is the rate of a marine-only
    system that never switches.
    """

    mode: str
    n_trials: int
    p_bd_hat: float
    p_bd_hw: float
    p_esd_hat: float
    p_esd_hw: float
    p_s_hat: float
    p_s_hw: float
    c_s_hat: float
    c_s_hw: float
    c_bd_hat: float
    c_esd_hat: float
    c_esd_dl_hat: float
    c_marine_hat: float
    mean_interferers: float


@dataclass
class _Totals:
    n: int = 0
    bd: int = 0
    esd: int = 0
    s: int = 0
    cap: float = 0.0
    cap_sq: float = 0.0
    cap_bd: float = 0.0
    cap_esd: float = 0.0
    cap_esd_dl: float = 0.0
    cap_marine: float = 0.0
    interferers: int = 0
    r_d: list = field(default_factory=list)

    def add(self, other: "_Totals"):
        for name in ("n", "bd", "esd", "s", "cap", "cap_sq", "cap_bd", "cap_esd",
                     "cap_esd_dl", "cap_marine", "interferers"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        self.r_d.extend(other.r_d)


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def proportion_halfwidth(successes: int, n: int) -> float:
    """95% half-width: normal approximation, or Wilson when ``n p (1-p) < 10``."""
    p = successes / n
    if n * p * (1 - p) >= 10:
        return _Z95 * math.sqrt(p * (1 - p) / n)
    z2 = _Z95 ** 2
    centre = (p + z2 / (2 * n)) / (1 + z2 / n)
    rad = _Z95 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
    return max(centre + rad - p, p - (centre - rad))


# --------------------------------------------------------------------------
# Per-trial link evaluation shared by both modes
# --------------------------------------------------------------------------

def _link_outcomes(scenario: Scenario, rng, n, r_u_km, r_d_km, interference_w, totals: _Totals):
    ln, fad = scenario.link, scenario.fading
    tau = scenario.tau_linear
    h_bd = fading.sample_rician(fad.marine, rng, n)
    snr_bd = ln.p_bd * ln.g_bd * h_bd ** 2 * scenario.r_bd_m ** (-ln.alpha_bd) / ln.sigma2_bd
    h_u2 = fading.sample_sr(fad.space, rng, n)
    h_d2 = fading.sample_sr(fad.space, rng, n)
    visible = r_u_km <= scenario.constellation.visible_distance_km
    snr_u = np.where(visible, ln.p_u * ln.g_u * h_u2 * (r_u_km * 1000.0) ** (-ln.alpha)
                     / ln.sigma2_u, 0.0)
    sinr_d = ln.p_d * ln.g_d * h_d2 * (r_d_km * 1000.0) ** (-ln.alpha) / (ln.sigma2_d + interference_w)

    marine_ok = snr_bd > tau
    space_ok = (snr_u > tau) & (sinr_d > tau)
    cap_marine = ln.b_bd * np.log2(1.0 + snr_bd)
    cap_bd = np.where(marine_ok, cap_marine, 0.0)
    cap_esd = np.where(marine_ok, 0.0, ln.b_esd * np.log2(1.0 + np.minimum(snr_u, sinr_d)))
    cap_dl = np.where(marine_ok, 0.0, ln.b_esd * np.log2(1.0 + sinr_d))
    cap = cap_bd + cap_esd

    totals.n += n
    totals.bd += int(marine_ok.sum())
    totals.esd += int(space_ok.sum())
    totals.s += int((marine_ok | space_ok).sum())
    totals.cap += math.fsum(cap)
    totals.cap_sq += math.fsum(cap * cap)
    totals.cap_bd += math.fsum(cap_bd)
    totals.cap_esd += math.fsum(cap_esd)
    totals.cap_esd_dl += math.fsum(cap_dl)
    totals.cap_marine += math.fsum(cap_marine)


def _interference(scenario: Scenario, rng, owner, r_j_km, n):
    """Per-trial interference power from flat arrays of owner index and distance."""
    ln = scenario.link
    gains = fading.sample_sr(scenario.fading.space, rng, len(r_j_km))
    power = ln.p_i * ln.g_i * gains * (r_j_km * 1000.0) ** (-ln.alpha)
    return np.bincount(owner, weights=power, minlength=n)


def _distributional_block(scenario: Scenario, seed: int, block: int, n: int) -> _Totals:
    rng = block_rng(seed, block)
    con = scenario.constellation
    law = geometry.DistanceLaw(con)
    r_u = geometry.sample_ru(law, rng, n)
    p_i = geometry.p_interferer(law, r_u)
    counts = rng.binomial(con.sats_per_channel - 1, p_i)
    owner = np.repeat(np.arange(n), counts)
    r_j = geometry.sample_visible_interferer_distance(con, r_u[owner], rng)
    interference = _interference(scenario, rng, owner, r_j, n)
    r_d = geometry.approx_rd(r_u, scenario.r_bd_km)
    totals = _Totals(interferers=int(counts.sum()))
    _link_outcomes(scenario, rng, n, r_u, r_d, interference, totals)
    return totals


@dataclass(frozen=True)
class PositionalSample:
    """True distances from ``n`` sampled constellations.

    ``owner`` and ``r_j_km`` list every visible co-channel interferer
    (distance to the ship) together with the trial it belongs to.
    """

    r_u_km: np.ndarray
    r_d_km: np.ndarray
    owner: np.ndarray
    r_j_km: np.ndarray


def sample_positional(scenario: Scenario, rng: np.random.Generator, n: int) -> PositionalSample:
    """Sample ``n`` constellations and measure serving and interferer distances.

    The Earth station sits at the north pole, the ship at great-circle
    distance ``r_bd_km`` from it.  The serving satellite is the one nearest
    the Earth station; interferers share its channel and lie within the
    visible distance of the ship.
    """
    con = scenario.constellation
    pos, chan = geometry.sample_constellations(con, rng, n)
    es = np.array([0.0, 0.0, con.earth_radius_km])
    ds = geometry.surface_point(con, scenario.r_bd_km)
    d_es = np.linalg.norm(pos - es, axis=-1)
    d_ds = np.linalg.norm(pos - ds, axis=-1)
    rows = np.arange(n)
    serve = np.argmin(d_es, axis=1)
    r_u = d_es[rows, serve]
    r_d = d_ds[rows, serve]
    co = chan == chan[rows, serve][:, None]
    co[rows, serve] = False
    vis = co & (d_ds <= con.visible_distance_km)
    owner, idx = np.nonzero(vis)
    return PositionalSample(r_u, r_d, owner, d_ds[owner, idx])


def _positional_block(scenario: Scenario, seed: int, block: int, n: int,
                      geometry_only: bool = False) -> _Totals:
    rng = block_rng(seed, block)
    smp = sample_positional(scenario, rng, n)
    totals = _Totals(interferers=len(smp.owner), r_d=[smp.r_d_km])
    if geometry_only:
        totals.n = n
        return totals
    interference = _interference(scenario, rng, smp.owner, smp.r_j_km, n)
    _link_outcomes(scenario, rng, n, smp.r_u_km, smp.r_d_km, interference, totals)
    return totals


def _run_block(args):
    mode, scenario, seed, block, n, geometry_only = args
    if mode == "distributional":
        return _distributional_block(scenario, seed, block, n)
    return _positional_block(scenario, seed, block, n, geometry_only)


def _collect(plan: TrialPlan, workers: int, geometry_only: bool = False) -> _Totals:
    jobs = [(plan.mode, plan.scenario, int(plan.seed), b, n, geometry_only)
            for b, n in plan.blocks()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_run_block, jobs))
    else:
        parts = [_run_block(j) for j in jobs]
    total = _Totals()
    for part in parts:
        total.add(part)
    return total


def _estimate(plan: TrialPlan, t: _Totals) -> EstimateRow:
    n = t.n
    mean = t.cap / n
    var = max(t.cap_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return EstimateRow(
        mode=plan.mode, n_trials=n,
        p_bd_hat=t.bd / n, p_bd_hw=proportion_halfwidth(t.bd, n),
        p_esd_hat=t.esd / n, p_esd_hw=proportion_halfwidth(t.esd, n),
        p_s_hat=t.s / n, p_s_hw=proportion_halfwidth(t.s, n),
        c_s_hat=mean, c_s_hw=_Z95 * math.sqrt(var / n),
        c_bd_hat=t.cap_bd / n, c_esd_hat=t.cap_esd / n, c_esd_dl_hat=t.cap_esd_dl / n,
        c_marine_hat=t.cap_marine / n,
        mean_interferers=t.interferers / n,
    )


def run(plan: TrialPlan, workers: int = 1) -> EstimateRow:
    """Run ``plan`` in whichever mode it names."""
    return _estimate(plan, _collect(plan, workers))


def run_distributional(plan: TrialPlan, workers: int = 1) -> EstimateRow:
    if plan.mode != "distributional":
        raise InvalidArgumentError("run_distributional needs a distributional plan")
    return run(plan, workers)


def run_positional(plan: TrialPlan, workers: int = 1) -> EstimateRow:
    if plan.mode != "positional":
        raise InvalidArgumentError("run_positional needs a positional plan")
    return run(plan, workers)


@dataclass(frozen=True)
class RdDistribution:
    """Binned empirical law of the true serving-satellite-to-ship distance."""

    edges_km: np.ndarray
    cdf: np.ndarray
    pdf: np.ndarray
    ks: float
    n: int
    samples_km: np.ndarray = field(repr=False)


def empirical_rd_distribution(plan: TrialPlan, n_bins: int = 100, workers: int = 1) -> RdDistribution:
    """Empirical serving distance law and its KS distance to the approximate CDF.

    Only geometry is simulated; fading draws are skipped.
    """
    if plan.mode != "positional":
        raise InvalidArgumentError("empirical_rd_distribution needs a positional plan")
    if n_bins < 1:
        raise InvalidArgumentError("n_bins must be >= 1")
    totals = _collect(plan, workers, geometry_only=True)
    r_d = np.concatenate(totals.r_d)
    law = geometry.DistanceLaw(plan.scenario.constellation, plan.scenario.r_bd_km)
    ks = stats.kstest(r_d, lambda x: geometry.rd_cdf(law, x)).statistic
    pdf, edges = np.histogram(r_d, bins=n_bins, density=True)
    cdf = np.searchsorted(np.sort(r_d), edges[1:], side="right") / len(r_d)
    return RdDistribution(edges, cdf, pdf, float(ks), len(r_d), r_d)
