# %% [markdown]
# Distance laws against sampled constellations
#
# The nearest-satellite law is exact for uniformly scattered satellites.
# The ship-to-serving-satellite distance uses hypot(R_u, R_bd), which
# ignores where the satellite sits in azimuth.  Here both are compared
# with full constellation draws.

# %%
import numpy as np
from scipy import stats

from leoship import geometry, montecarlo
from leoship.model import default_scenario

sc = default_scenario()
con = sc.constellation
law = geometry.DistanceLaw(con)
rng = np.random.default_rng(7)

smp = montecarlo.sample_positional(sc, rng, 20_000)
ks_u = stats.kstest(smp.r_u_km, lambda r: geometry.ru_cdf(law, r)).statistic
print(f"serving distance R_u: KS = {ks_u:.4f} over {smp.r_u_km.size} constellations")

# %% [markdown]
# Mean number of visible co-channel interferers at the ship.

# %%
m = con.sats_per_channel - 1
expected = np.mean(m * geometry.p_interferer(law, geometry.sample_ru(law, rng, 10 ** 6)))
print(f"mean interferers: sampled {smp.owner.size / smp.r_u_km.size:.3f}, law {expected:.3f}")

# %% [markdown]
# The ship distance: the approximation against the sampled truth.  The
# gap does not shrink with more trials; it is a property of the formula.

# %%
rd_law = geometry.DistanceLaw(con, sc.r_bd_km)
ks_d = stats.kstest(smp.r_d_km, lambda r: geometry.rd_cdf(rd_law, r)).statistic
err = smp.r_d_km - geometry.approx_rd(smp.r_u_km, sc.r_bd_km)
print(f"ship distance R_d: KS = {ks_d:.4f}; approximation error "
      f"mean {err.mean():+.1f} km, spread {err.std():.1f} km, R_d spread {smp.r_d_km.std():.1f} km")

near = default_scenario(r_bd_nmile=1.0)
smp_near = montecarlo.sample_positional(near, rng, 20_000)
ks_near = stats.kstest(smp_near.r_d_km,
                       lambda r: geometry.rd_cdf(geometry.DistanceLaw(con, near.r_bd_km), r)).statistic
print(f"with the ship 1 n mile from the Earth station: KS = {ks_near:.4f}")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    r = np.linspace(rd_law.rd_support[0], 1900.0, 400)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(smp.r_d_km, bins=80, density=True, alpha=0.5, label="sampled constellations")
    ax.plot(r, geometry.rd_pdf(rd_law, r), label="hypot approximation")
    ax.set_xlim(r[0], r[-1])
    ax.set_xlabel("serving satellite to ship (km)")
    ax.legend()
    fig.savefig("distance_laws.png", dpi=120, bbox_inches="tight")
    print("wrote distance_laws.png")
