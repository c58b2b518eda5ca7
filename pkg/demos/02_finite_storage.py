# # How much does a leaky memory cost?
#
# beta scales the storage-assisted rate when stored photons decay with
# lifetime tau. The check here is that even tau = 1000 cycles loses < 10%.

# %%
import numpy as np

from hybridrate import model
from hybridrate.scenarios import preset

params = preset("ir780").params
T = model.cycle_period(params)
p = model.p_flag(params)
print(f"cycle period {T * 1e6:.2f} us, flag probability {p:.4f}")

# %%
print(f"\n{'tau/T':>10} {'beta':>8} {'rate Hz':>10}")
for ratio in np.logspace(0, 5, 11):
    finite = params.replace(tau=ratio * T)
    print(f"{ratio:10.1f} {model.beta(finite):8.4f} {model.rate_storage_finite(0, finite):10.2f}")

# %% [markdown]
# Short lifetimes push beta down to p / (2 - p): only photons that meet in
# the same cycle survive.

# %%
print(f"\nshort-lifetime floor p/(2-p) = {p / (2 - p):.5f}")
for pnd in (0.25, 0.5, 0.75, 1.0):
    q = params.replace(p_nd=pnd, tau=1000 * T)
    print(f"  P_nd = {pnd:4.2f}: p = {model.p_flag(q):.4f}, beta = {model.beta(q):.4f}")
