"""Flux-to-frequency map of the tunable transmon and the AC sweet spot.

Under a cosine flux drive the qubit frequency averages below its parked
maximum. The average shift has a minimum in drive amplitude; at that
amplitude the time-averaged frequency is first-order insensitive to
amplitude noise, which is the operating point used for the gate.
"""

import numpy as np

from paramcz import (average_shift, frequency_at_flux, q6_spec,
                     sweet_spot_amplitude)

q6 = q6_spec()

print("flux map of the tunable transmon")
for phi in (0.0, 0.1, 0.25, 0.4, 0.5):
    print(f"  f({phi:4.2f} Phi0) = {frequency_at_flux(q6, phi):.4f} GHz")

eps = np.linspace(0.05, 0.95, 46)
shift = average_shift(q6, eps)
star = sweet_spot_amplitude(q6)

print("\naverage frequency shift under modulation")
for e, s in zip(eps[::9], shift[::9]):
    print(f"  eps = {e:4.2f} Phi0 -> {s:8.2f} MHz")

print(f"\nAC sweet spot: eps* = {star:.5f} Phi0, "
      f"shift = {average_shift(q6, star):.2f} MHz")

h = 1e-4
slope = (average_shift(q6, star + h) - average_shift(q6, star - h)) / (2 * h)
print(f"slope of the shift at eps*: {slope:.2e} MHz/Phi0 (first-order flat)")
