# %% [markdown]
# Rate capacity as the ship sails away
#
# Close to shore the 30 MHz marine link carries all traffic.  As it
# starts failing the system falls back to the 250 MHz relay, so capacity
# first sags and then climbs to the relay plateau.  A marine link without
# diffuse fading gives the hard-switch limit for comparison.

# %%
import numpy as np

from leoship import analysis
from leoship.model import default_scenario

dist = np.arange(4.0, 61.0, 4.0)
print(" n mile   c_s (Mbit/s)   hard switch (Mbit/s)")
caps = []
for d in dist:
    c = analysis.c_s(default_scenario(r_bd_nmile=d))
    hard = analysis.c_s_awgn_limit(default_scenario(r_bd_nmile=d, k_rician=1e6))
    caps.append(c)
    print(f"{d:7.0f}   {c / 1e6:12.1f}   {hard / 1e6:12.1f}")

i = int(np.argmin(caps))
print(f"capacity bottoms out near {dist[i]:.0f} n mile at {caps[i] / 1e6:.1f} Mbit/s")
sw = analysis.switch_radius_km(default_scenario()) / 1.852
print(f"hard-switch distance at 10 dB: {sw:.1f} n mile")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(dist, np.array(caps) / 1e6, marker="o")
    ax.set_xlabel("base station to ship (n mile)")
    ax.set_ylabel("average rate (Mbit/s)")
    fig.savefig("capacity_vs_distance.png", dpi=120, bbox_inches="tight")
    print("wrote capacity_vs_distance.png")
