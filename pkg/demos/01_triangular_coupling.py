"""
Coupling two polynomially stable blocks
=======================================

A triangular generator [[A1, B C], [0, A2]] inherits the decay of its
diagonal blocks only when the coupling is smooth enough. Here
A1 = A2 = diag(-1/k^2 + ik) and B = C = (-A1)^(-s/2).
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from polystab import (Exponents, assemble_triangular, negative_fractional_power,
                      polynomial_damped, verdict_for)
from polystab.repro import tri_optimal_curve

alpha, n = 2.0, 200
gen = polynomial_damped(n, alpha)

# %% The exponent condition: beta/alpha1 + gamma/alpha2 must exceed 1
for s in (1.0, 2.0, 3.0):
    b = negative_fractional_power(gen, s / 2)
    # the coupling space stands in for an infinite sequence space
    sys = assemble_triangular(gen, gen, b, b, y_finite=False,
                              exponents=Exponents(alpha1=alpha, alpha2=alpha, beta=s / 2, gamma=s / 2))
    v = verdict_for(sys)
    print(f"s = {s}: verdict {v.applicable}, margins {v.condition_margins}")

# %% What goes wrong below the threshold: t ||T1(t) (-A1)^(-s)|| keeps growing
ts = np.geomspace(1, 1e5, 300)
fig, ax = plt.subplots()
for s in (1.0, 1.5, 2.0):
    ax.loglog(ts, tri_optimal_curve(alpha, n, s, ts), label=f"s = {s}")
ax.axhline(1 / np.e, ls=":", c="k")
ax.set_xlabel("t")
ax.set_ylabel("t ||T1(t) (-A1)^-s||")
ax.legend()
fig.savefig("triangular_coupling.svg")
print("wrote triangular_coupling.svg")
