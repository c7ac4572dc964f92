# %% [markdown]
# # Monte-Carlo check of the Gaussian identity
#
# For Gaussian noise `<cos phi> = exp(-<phi^2> / 2)`. Simulating noise
# trajectories and averaging the phase factor must give the same
# visibility as the quadrature, within the sampling error.

# %%
import numpy as np

from ddspec import PowerLaw, chi_numeric, make_cpmg, mc_visibility, tau_c_numeric
from ddspec.stochastic import default_grid, infrared_cutoff

spec = PowerLaw(1288.0, 0.89)

# %%
for N in (1, 4, 10):
    tc = tau_c_numeric(spec, N)
    for frac in (0.5, 1.0, 1.5):
        seq = make_cpmg(N, frac * tc)
        est = mc_visibility(spec, seq, 2000, seed=10 * N + int(10 * frac))
        ref = chi_numeric(spec, seq).visibility
        print(f"N={N:2d} T={frac:.1f} tau_c  MC {est.visibility_mean:.4f} +- {est.std_error:.4f}  "
              f"quadrature {ref:.4f}  z={(est.visibility_mean - ref) / est.std_error:+.2f}")

# %% [markdown]
# A finite noise record has no power below its lowest frequency bin. With
# pulses this hardly matters, but the Ramsey integral for alpha close to 1
# picks up a lot from there, so the comparison uses the record's own cutoff.

# %%
T = tau_c_numeric(spec, 0)
dt, n = default_grid(T)
seq = make_cpmg(0, T)
est = mc_visibility(spec, seq, 2000, seed=3)
print("MC", est.visibility_mean, "+-", est.std_error)
print("no cutoff", chi_numeric(spec, seq).visibility)
print("matched cutoff", chi_numeric(spec, seq, omega_ir=infrared_cutoff(dt, n, 0.89)).visibility)
