# %% [markdown]
# # Visibility dips from a narrow resonance
#
# A Gaussian line at 100 Hz is sampled whenever a filter peak
# `(2k + 1) N pi / T` crosses it. For N = 8 that happens near 40, 120 and
# 200 ms, where the coherence integral has local maxima.

# %%
import numpy as np

from ddspec import GaussianResonance, chi_numeric, dip_times, make_cpmg

w0 = 2 * np.pi * 100
spec = GaussianResonance(30.0, w0, 0.02 * w0)
print("predicted", dip_times(w0, 8, 2))

# %%
T = np.linspace(0.08, 0.24, 321)
chi = np.array([chi_numeric(spec, make_cpmg(8, t)).chi for t in T])
peak = np.flatnonzero((chi[1:-1] > chi[:-2]) & (chi[1:-1] > chi[2:])) + 1
big = peak[np.argsort(chi[peak])[-2:]]
print("largest maxima at", np.sort(T[big]))
print("ratio", np.max(T[big]) / np.min(T[big]), "vs", 5 / 3)
