# # Entanglement rates versus link length
#
# Closed-form rates for the three protocols on both presets, then the gain
# over the homogeneous network and the lengths where the curves cross.

# %%
import numpy as np

from hybridrate import model
from hybridrate.scenarios import find_crossover, preset

lengths = np.array([0, 0.5, 1, 2, 5, 10, 20, 50])

# %%
for name in ("ir780", "cband"):
    params = preset(name).params
    print(f"\n{name}: rate in Hz")
    print(f"{'L km':>6} {'baseline':>12} {'ndspm':>12} {'storage':>12}")
    for L in lengths:
        row = [model.rate(L, params, p) for p in ("baseline", "ndspm", "ndspm_storage")]
        print(f"{L:6.1f} " + " ".join(f"{v:12.4g}" for v in row))

# %% [markdown]
# Far away the storage gain over the homogeneous rate levels off. The limit
# depends only on the storage efficiency and the source and conversion stages.

# %%
for name in ("ir780", "cband"):
    params = preset(name).params
    asym = model.asymptotic_ratio(params)
    print(f"\n{name}: storage gain, limit {asym:.1f}")
    for L in (10, 100, 500, 1000, 2000):
        # compare through the exact identity; the raw rates underflow at 780 nm
        gain = asym * 2 * model.travel_time(L, params) / model.t_star(L, params)
        print(f"  {L:5d} km  {gain:8.2f}")

# %%
pairs = [
    (("ir780", "ndspm"), ("cband", "baseline"), (0.5, 5)),
    (("ir780", "ndspm_storage"), ("cband", "baseline"), (1, 10)),
    (("cband", "ndspm"), ("ir780", "ndspm_storage"), (1, 10)),
]
print("\ncrossovers")
for a, b, (lo, hi) in pairs:
    L = find_crossover(*a, *b, lo, hi)
    print(f"  {a[0]}+{a[1]} vs {b[0]}+{b[1]}: {L:.3f} km")

# %%
for name in ("ir780", "cband"):
    print(f"\n{name}: flag-only protocol loses beyond ~{model.ndspm_breakeven_length(preset(name).params):.2f} km")
