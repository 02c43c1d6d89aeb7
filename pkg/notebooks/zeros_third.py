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
# # Zeros of zeta(s, 1/3) right of the critical line
#
# Unlike the Riemann zeta function, zeta(s, 1/3) has no Euler product, and its
# zeros leave the line Re(s) = 1/2. The finder seeds from grid minima, polishes
# with Newton and certifies each find by a winding number.

# %%
from fractions import Fraction

from hurwitzlab.lab import find_zeros
from hurwitzlab.multizeta import CompactBox

box = CompactBox(((0.55, 0.95),), ((0.0, 200.0),))
zeros = find_zeros(Fraction(1, 3), box)
for z in zeros:
    s = z.location[0]
    print(f"{s.real:.10f} {s.imag:+.10f}i   |f| = {z.residual:.1e}   winding {z.winding}/{z.winding_wide}")

# %%
# the same box for zeta(s) itself stays empty up to this height
print(find_zeros(1.0, box))
