"""
A damped plate driven by a pole-placed string
=============================================

The 2D wave with damping on the strip 0 <= z1 <= 1 is polynomially stable
with alpha 2. The 1D wave with closed-loop eigenvalues -1/|k|^(5/3) + ik pi
feeds into it. The exponent condition 1/2 + 3/5 > 1 gives alpha = 2.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from polystab import (WaveSpec, build_coupled_wave, decay_curve, fit_growth_exponent,
                      frequency_grid, resolvent_norm_sweep, spectral_check, verdict_for)

spec = WaveSpec(n_modes_2d=8, n_modes_1d=64)
sys = build_coupled_wave(spec)
v = verdict_for(sys)
print("verdict:", v.applicable, "alpha =", v.predicted_alpha, "margins:", v.condition_margins)

sp = spectral_check(sys.matrix)
print(f"{sp.eigenvalues.size} eigenvalues, abscissa {sp.abscissa:.3e}")

# %% Resolvent norm along the imaginary axis
sweep = resolvent_norm_sweep(sys.matrix, frequency_grid(3, 40, 400, sp.eigenvalues))
fit = fit_growth_exponent(sweep)
print(f"fitted resolvent exponent on [3, 40]: {fit.slope:.3f}")

# %% Decay of classical solutions
ts = np.geomspace(1, 200, 40)
curve = decay_curve(sys.matrix, ts, beta=1)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
ok = sweep.finite
ax1.loglog(sweep.params[ok], sweep.values[ok])
ax1.set_xlabel("omega")
ax1.set_ylabel("||R(i omega, A)||")
ax2.loglog(curve.params, curve.values)
ax2.set_xlabel("t")
ax2.set_ylabel("||T(t) A^-1||")
fig.tight_layout()
fig.savefig("coupled_waves.svg")
print("wrote coupled_waves.svg")
