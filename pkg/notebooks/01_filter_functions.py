# %% [markdown]
# # Filter functions of delta-pulse sequences
#
# A sequence of pi-pulses flips the sign with which the detuning noise
# enters the qubit phase. Its filter function says which noise frequencies
# still get through.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ddspec import filter_cpmg_closed, filter_cpmg_sinc, filter_exact, make_cpmg, make_uhrig
from ddspec.filters import peak_frequencies

# %% [markdown]
# Fixed total length of 50 ms, N = 0..10 pulses. The main peak moves up to
# `N pi / T` as N grows, so more pulses push the sensitivity to higher
# frequencies where a 1/f-like spectrum has less power.

# %%
T = 0.05
omega = np.linspace(0, 2 * np.pi * 400, 4001)
fig, ax = plt.subplots(figsize=(7, 4))
for N in (0, 1, 2, 4, 6, 8, 10):
    ax.plot(omega / (2 * np.pi), filter_exact(make_cpmg(N, T), omega), label=f"N={N}")
ax.set_xlabel("frequency (Hz)")
ax.set_ylabel("g(omega, T)")
ax.legend()
fig.savefig("filters_T50ms.png", dpi=120)

print("first peak for N=10:", peak_frequencies(10, T, 0)[0] / (2 * np.pi), "Hz")

# %% [markdown]
# Three ways to evaluate the CPMG filter. The closed form agrees with the
# exact segment sum; the sinc-squared sum is a large-N approximation and
# is visibly off for small N.

# %%
u = np.linspace(0.1, 60, 3000)
for N in (2, 16):
    ex = filter_exact(make_cpmg(N, 1.0), u)
    cl = filter_cpmg_closed(N, u)
    sc = filter_cpmg_sinc(N, u)
    print(N, "closed:", np.max(np.abs(cl - ex) / np.maximum(ex, 1e-15)), "sinc sup-norm:", np.max(np.abs(sc - ex)))

# %% [markdown]
# Uhrig pulses sit at `T sin^2(j pi / (2N + 2))`. For N = 1 and 2 they land
# on the CPMG times; from N = 3 on the low-frequency suppression differs.

# %%
u = np.geomspace(1e-2, 10, 7)
print(np.column_stack((u, filter_exact(make_cpmg(5, 1.0), u), filter_exact(make_uhrig(5, 1.0), u))))
