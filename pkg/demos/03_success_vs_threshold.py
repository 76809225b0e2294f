# %% [markdown]
# Success probability against the SNR threshold
#
# Theory and a million-trial distributional simulation, per link and end
# to end.  The marine link wins at low thresholds; the satellite relay
# takes over once the threshold grows past about 11 dB.

# %%
import numpy as np

from leoship import analysis, montecarlo
from leoship.model import default_scenario

taus = np.arange(-10.0, 31.0, 2.0)
rows = []
for tau in taus:
    sc = default_scenario(tau_db=tau)
    th = analysis.evaluate(sc, capacity=False)
    est = montecarlo.run(montecarlo.TrialPlan("distributional", 200_000, 1, sc))
    rows.append((tau, th.p_bd, th.p_esd, th.p_s, est.p_s_hat, est.p_s_hw))
    print(f"{tau:5.1f} dB  p_bd {th.p_bd:.4f}  p_esd {th.p_esd:.4f}  "
          f"p_s {th.p_s:.4f}  MC {est.p_s_hat:.4f} +/- {est.p_s_hw:.4f}")

# %%
fine = np.arange(0.0, 20.01, 0.5)
cross = next(t for t in fine
             if analysis.p_esd(default_scenario(tau_db=t)) > analysis.p_bd(default_scenario(tau_db=t)))
print(f"space link overtakes the marine link at {cross:.1f} dB")

p8 = analysis.evaluate(default_scenario(tau_db=13.0), capacity=False)
print(f"at 13 dB the relay lifts success from {p8.p_bd:.3f} to {p8.p_s:.3f} "
      f"({100 * (p8.p_s - p8.p_bd) / p8.p_bd:.0f}% more)")

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None:
    arr = np.array(rows)
    fig, ax = plt.subplots(figsize=(6, 4))
    for col, label in ((1, "marine"), (2, "space"), (3, "end to end")):
        ax.plot(arr[:, 0], arr[:, col], label=label)
    ax.errorbar(arr[:, 0], arr[:, 4], yerr=arr[:, 5], fmt="o", ms=3, label="simulation")
    ax.set_xlabel("threshold (dB)")
    ax.set_ylabel("success probability")
    ax.legend()
    fig.savefig("success_vs_threshold.png", dpi=120, bbox_inches="tight")
    print("wrote success_vs_threshold.png")
