# %% [markdown]
# # Coherence times under power-law noise
#
# For `S(omega) = S0 / omega^alpha` the coherence integral scales exactly as
# `T^(1 + alpha)`, so each sequence has a single coherence time where the
# visibility falls to 1/e.

# %%
import numpy as np

from ddspec import PowerLaw, chi_numeric, make_cpmg, tau_c_analytic, tau_c_numeric

S0, alpha = 1288.0, 0.89
spec = PowerLaw(S0, alpha)

# %%
rows = []
for N in (0, 1, 2, 4, 6, 8, 10):
    num = tau_c_numeric(spec, N)
    ana = tau_c_analytic(S0, alpha, N) if N else np.nan
    rows.append((N, num * 1e3, ana * 1e3))
    print(f"N={N:2d}  numeric {num * 1e3:7.2f} ms   large-N law {ana * 1e3:7.2f} ms")

# %% [markdown]
# The large-N law predicts `tau_c ~ N^(alpha / (1 + alpha))`, close to
# `N^0.47` here. It drifts toward the quadrature as N grows.

# %%
N = np.arange(1, 11)
slope = np.polyfit(np.log(N), np.log([tau_c_analytic(S0, alpha, n) for n in N]), 1)[0]
print("scaling exponent", slope, "expected", alpha / (1 + alpha))
gap = [abs(tau_c_numeric(spec, n) - tau_c_analytic(S0, alpha, n)) / tau_c_numeric(spec, n) for n in N]
print(np.round(gap, 4))

# %% [markdown]
# Ramsey decay is not Gaussian but `exp(-(T / tau_c)^(1 + alpha))`.

# %%
T = np.geomspace(1e-3, 0.05, 6)
chi = [chi_numeric(spec, make_cpmg(0, t)).chi for t in T]
print("log-log slope", np.polyfit(np.log(T), np.log(chi), 1)[0])
