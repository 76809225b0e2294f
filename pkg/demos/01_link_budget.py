# %% [markdown]
# Link budgets at the reference scenario
#
# Every distance is stored in km but path loss is evaluated in metres.
# The marine link runs from a shore base station at 40 nautical miles;
# the space link relays through the satellite nearest the Earth station.

# %%
import math

from leoship import analysis
from leoship.model import (ConstellationSpec, default_scenario, interference_sum, sinr_downlink,
                           snr_marine, snr_uplink, unit_convert)

sc = default_scenario()
link, con = sc.link, sc.constellation
print(f"40 n mile = {unit_convert(40, 'nmile->km'):.2f} km")
print(f"marine-link noise over 30 MHz at -174 dBm/Hz: "
      f"{unit_convert(-174, 'psd_bw->watts', bandwidth_hz=30e6):.3e} W")

# %% [markdown]
# SNR without fading (unit gains).

# %%
for name, value in [
    ("marine, 40 n mile", snr_marine(link, 1.0, sc.r_bd_m)),
    ("uplink, 1200 km", snr_uplink(link, con, 1.0, 1.2e6)),
    ("downlink, 1200 km", sinr_downlink(link, 1.0, 1.2e6)),
]:
    print(f"{name:>20}: {value:10.3f}  ({10 * math.log10(value):5.1f} dB)")

one = interference_sum(link, [(1.0, 1.2e6)])
print(f"one interferer at 1200 km delivers {one:.3e} W, "
      f"{one / link.sigma2_d:.1f}x the downlink noise")

# %% [markdown]
# Without marine fading the link meets a 10 dB threshold out to the
# switch radius; past it the ship needs the satellite.

# %%
r_sw = analysis.switch_radius_km(sc)
print(f"switch radius at 10 dB: {r_sw:.1f} km = {unit_convert(r_sw, 'km->nmile'):.1f} n mile")
print(f"visible distance at {con.altitude_km:.0f} km altitude: {con.visible_distance_km:.0f} km")
print(f"visible distance at 600 km altitude: "
      f"{ConstellationSpec(1000, 10, 600.0).visible_distance_km:.0f} km")
