# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Scanning shifts of the Riemann zeta function
#
# Target: the constant 1 on a small square around 3/4. We record the grid
# sup-distance of zeta(s + it) to the target at every t on a 0.05 lattice.

# %%
import numpy as np

from hurwitzlab.lab import Continuous, ScanSpec, scan_shifts, sup_distance
from hurwitzlab.multizeta import CompactBox

box = CompactBox.square(0.75 + 0j, 0.02)
spec = ScanSpec((1.0,), Continuous((0.05,)), (0.0, 1000.0), 1.0, box, eps=0.3)
res = scan_shifts(spec)
print(f"{len(res.records)} shifts in {res.runtime:.1f} s")
print("best:", res.best)

# %%
d = np.array([r.sup_distance for r in res.records])
for eps in (0.1, 0.3, 0.5, 1.0, 2.0):
    print(f"eps = {eps:4.1f}   density = {np.mean(d < eps):.3f}")

# %% [markdown]
# Refining the grid around the best shift barely moves the distance.

# %%
t = res.best.shift[0]
fine = CompactBox(box.sigma, box.t, 2 * box.grid - 1)
print(sup_distance(1.0, t, 1.0, box), sup_distance(1.0, t, 1.0, fine))

# %%
res.write_csv("scan_riemann.csv")
