# # Monte Carlo against the closed forms
#
# Each run steps through 10^7 source cycles. The cycle-rounded prediction uses
# the same whole-cycle delays as the simulation; the smooth one is the plain
# formula.

# %%
from hybridrate import model
from hybridrate.params import Protocol
from hybridrate.scenarios import preset
from hybridrate.simulator import SimConfig, agrees_with_analytic, analytic_rate, run_batch

cases = [(name, SimConfig(preset(name).params, L, proto, 10**7, seed=1))
         for name in ("ir780", "cband") for proto in Protocol for L in (0.0, 1.0, 5.0)]
results = run_batch([c for _, c in cases], workers=4)

# %%
print(f"{'preset':>6} {'protocol':>14} {'L':>4} {'events':>8} {'sim Hz':>10} {'+/-':>7} "
      f"{'rounded':>10} {'smooth':>10} ok")
for (name, c), r in zip(cases, results):
    rounded = analytic_rate(c)
    smooth = model.rate(c.length_km, c.params, c.protocol)
    print(f"{name:>6} {c.protocol.value:>14} {c.length_km:4.0f} {r.entanglement_events:8d} "
          f"{r.rate_estimate:10.2f} {r.rate_std_error:7.2f} {rounded:10.2f} {smooth:10.2f} "
          f"{'yes' if agrees_with_analytic(r, rounded) else 'NO'}")

# %% [markdown]
# Storage with decay at zero length, against beta times the perfect-storage rate.

# %%
from hybridrate.simulator import run_simulation

params = preset("ir780").params
T = model.cycle_period(params)
for ratio in (10, 100, 1000):
    finite = params.replace(tau=ratio * T)
    r = run_simulation(SimConfig(finite, 0.0, "ndspm_storage", 10**7, seed=ratio))
    print(f"tau = {ratio:4d} T: {r.rate_estimate:8.2f} +/- {r.rate_std_error:5.2f} Hz, "
          f"predicted {model.rate_storage_finite(0, finite):8.2f}")
