# %% [markdown]
# # Power-law plus white fit of a measured PSD
#
# A Welch estimate of a long noise record, averaged in logarithmic bins and
# fitted in log space with `S_PLN / omega^alpha + S_WN`.

# %%
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ddspec import PowerLawPlusWhite, generate_noise
from ddspec.estimation import fit_psd_powerlaw_white, psd_model, rebin_log, welch_psd

truth = PowerLawPlusWhite(1e-3, 0.8904, 1e-7)
ts = generate_noise(truth, dt=1e-4, n=2**20, seed=5)
omega, S = welch_psd(ts, 2**14)

# %%
fit = fit_psd_powerlaw_white(omega, S)
print(fit.params)
print(fit.errors)

# %%
w, s, _ = rebin_log(omega, S)
fig, ax = plt.subplots()
ax.loglog(omega[1:], S[1:], lw=0.5, alpha=0.4, label="Welch")
ax.loglog(w, s, "o", ms=3, label="log bins")
ax.loglog(w, psd_model(w, *fit.values), label="fit")
ax.set_xlabel("omega (rad/s)")
ax.legend()
fig.savefig("psd_fit.png", dpi=120)
