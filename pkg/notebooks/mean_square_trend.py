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
# # Mean square of the double zeta function on the critical plane
#
# The ratio of the integral over [T^0.3, T]^2 to (T log T)^2 / 2 approaches 1
# only slowly. The lower-order terms still dominate at a few hundred.
# Runtime is about a minute.

# %%
import math
import time

from hurwitzlab.lab import mean_square

for T in (150.0, 300.0, 600.0, 1200.0):
    start = time.perf_counter()
    r = mean_square((1, 1), 2, T, samples=100_000)
    print(f"T = {T:6.0f}   ratio = {r.ratio:.4f}   {time.perf_counter() - start:.1f} s")

# %% [markdown]
# For one variable the second term is known in closed form, and the
# measured ratios sit right on it.

# %%
for T in (5000.0, 1e4, 2e4):
    r = mean_square(1.0, 1, T)
    classical = 1 - (1 + math.log(2 * math.pi) - 2 * 0.5772156649015329) / math.log(T)
    print(f"T = {T:7.0f}   ratio = {r.ratio:.4f}   classical = {classical:.4f}")
