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
# # Calibrating the raw smoothed-sum bound
#
# `zeta_eval(..., completion=False)` returns the gap-smoothed sum together with
# an error bound of the form `B * T**-A`. Here we measure how far the raw sum
# sits from the completed value at `Re(s_j) = 1.5` and pick `B` for `A = 2`.

# %%
import numpy as np

from hurwitzlab.multizeta import zeta_smoothed, zeta_values

rng = np.random.default_rng(20240611)
A = 2.0

# %%
rows = []
for T in (50, 100, 200, 400):
    for _ in range(6):
        t = rng.uniform(T**0.3, T, 2)
        s = 1.5 + 1j * t
        raw = zeta_smoothed(s, (1.0, 1.0), T)
        full = zeta_values(s[None, :], (1.0, 1.0), max(T, 64.0))[0]
        rows.append((T, abs(raw - full) * T**A))
rows = np.array(rows)
for T in np.unique(rows[:, 0]):
    print(f"T = {T:5.0f}   max |raw - completed| * T^A = {rows[rows[:, 0] == T, 1].max():.3g}")

# %% [markdown]
# The scaled gap is largest at small T. Rounding the overall maximum up to a
# power of ten gives the shipped constant.

# %%
worst = rows[:, 1].max()
print("suggested B:", 10 ** np.ceil(np.log10(worst)))
