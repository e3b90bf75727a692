"""Monte-Carlo Ramsey experiments on the modulated qubit.

Amplitude noise on the flux drive dephases the qubit through the slope
of the time-averaged frequency shift. Away from the AC sweet spot the
slope is large and T2* dips well below its static value; at the sweet
spot the slope vanishes and coherence resurges, unless the generator's
white noise floor is high enough to take over.
"""

import numpy as np

from paramcz import (NoiseProfile, q6q7_pair, simulate_ramsey_under_modulation,
                     sweet_spot_amplitude)

pair = q6q7_pair()
eps_star = sweet_spot_amplitude(pair.tunable)
t2_static = pair.tunable.t2_star
delays = np.linspace(100.0, 48000.0, 60)  # ns

quiet = NoiseProfile(white_floor=-150.0)
noisy = NoiseProfile(white_floor=-135.0)

print(f"static T2* = {t2_static:.1f} us\n")
print("amplitude   floor(dBm/Hz)   fitted T2* (us)   ratio")
for eps in (0.15, 0.31, 0.45, eps_star):
    fit = simulate_ramsey_under_modulation(pair, eps, 88.5, quiet, delays,
                                           shots=1500, seed=1)
    print(f"  {eps:5.3f}       -150          {fit.value:6.1f}          "
          f"{fit.value / t2_static:.2f}")

fit_hi = simulate_ramsey_under_modulation(pair, eps_star, 88.5, noisy, delays,
                                          shots=1500, seed=1)
print(f"  {eps_star:5.3f}       -135          {fit_hi.value:6.1f}          "
      f"{fit_hi.value / t2_static:.2f}")

print("\nthe sweet spot restores coherence with a quiet instrument; a")
print("15 dB worse floor leaves only a partial resurgence")
