"""
Link budget at the default operating point
==========================================

How far can a UAV sit from its target, and how far from the base station,
before sensing or the uplink gives out?
"""

import numpy as np

from jrcswarm.physics import CommParams, RadarParams, channel_gain, data_rate, radar_range, radar_snr, sinr

rp = RadarParams()
cp = CommParams()

# Echo SNR falls with the fourth power of distance. At 30 W and 40 m the
# margin over the detection threshold is enormous.
print(f"SNR at 30 W, 40 m:  {radar_snr(30.0, 40.0, rp):.4g}  (threshold {rp.snr_min_eta:g})")

# The radar range is where that margin runs out. It only grows with the
# fourth root of power, so halving the radar share costs about 16 %.
for p in (30.0, 15.0, 10.0, 5.0):
    print(f"radar range at {p:4.1f} W: {radar_range(p, rp):6.1f} m")

# Uplink: the noise floor Bc * delta0 is 2 mW, so a lone UAV needs roughly
# p_c >= 5.6e-4 * d^2 watts to clear R_min at distance d.
d = np.array([20.0, 100.0, 200.0, 400.0])
for p_c in (1.0, 15.0):
    rates = [data_rate(sinr(0, [p_c], [channel_gain(x, cp)], cp, rp.tx_gain_gT), cp) for x in d]
    print(f"p_c = {p_c:4.1f} W:", ", ".join(f"{x:.0f} m -> {r / 1e6:.3f} Mbit/s" for x, r in zip(d, rates)))
