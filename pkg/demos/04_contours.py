# # Where storage pays off
#
# Gain of the storage-assisted network over the homogeneous baseline as a
# function of storage efficiency E_s (rows) and flag efficiency P_nd (columns).

# %%
import numpy as np

from hybridrate import model
from hybridrate.scenarios import contour_grid, preset

axis = np.linspace(0, 1, 6)
for name, L in (("ir780", 1.0), ("cband", 10.0)):
    g = contour_grid(name, L, axis, axis)
    print(f"\n{name} at {L:g} km (rows E_s, columns P_nd)")
    print("      " + " ".join(f"{d:8.1f}" for d in axis))
    for e, row in zip(axis, g):
        print(f"{e:5.1f} " + " ".join("     n/a" if np.isnan(v) else f"{v:8.2f}" for v in row))

# %% [markdown]
# The C-band gain at E_s = P_nd = 0.6 and the long-distance ceiling it creeps towards.

# %%
cb = preset("cband").params
print("\ncband, E_s = P_nd = 0.6")
for L in (10, 50, 200, 1000):
    print(f"  {L:5d} km: {contour_grid('cband', L, [0.6], [0.6])[0, 0]:7.2f}")
print(f"  limit: {model.asymptotic_ratio(cb.replace(e_s=0.6, p_nd=0.6)):7.2f}")
