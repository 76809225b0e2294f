# %% [markdown]
# How many satellites?
#
# With a handful of satellites the Earth station often has none in view.
# With many, the ship hears more co-channel interferers.  At 600 km the
# two effects balance near a hundred-odd satellites.

# %%
import numpy as np

from leoship import analysis, montecarlo
from leoship.model import default_scenario

sizes = np.arange(20, 401, 20)
ps, mc = [], []
for n in sizes:
    sc = default_scenario(n_sats=int(n), altitude_km=600.0)
    ps.append(analysis.p_s(sc))
    mc.append(montecarlo.run(montecarlo.TrialPlan("positional", 10_000, 1, sc)))
    print(f"N = {n:3d}: theory {ps[-1]:.4f}  positional {mc[-1].p_s_hat:.4f} "
          f"+/- {mc[-1].p_s_hw:.4f}  interferers {mc[-1].mean_interferers:.2f}")

k = int(np.argmax(ps))
print(f"theory peaks at N = {sizes[k]} with p_s = {ps[k]:.4f}")

# %% [markdown]
# Channel count works the other way: more channels, fewer co-channel
# satellites, until the noise floor dominates.

# %%
for k in (10, 50, 200, 500, 1000):
    print(f"K = {k:4d}: p_s = {analysis.p_s(default_scenario(n_channels=k)):.4f}")
