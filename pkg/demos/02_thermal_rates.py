"""
Thermal rates and the detailed-balance ratio
============================================

Averaging |T|^2 over a Maxwell-Boltzmann gas gives transition rates a(k, l).
Detailed balance holds when a(k, l) exp(-beta eps_l) = a(l, k) exp(-beta eps_k);
the ratio I(k, l) measures how far off we are.
"""

import numpy as np

from detbal import ThermalBath, reference_triangle, rate_matrix
from detbal.thermal_rates import dbe_identity_check

model = reference_triangle()
channels, v = model.channels(), model.coupling()

table = rate_matrix(ThermalBath(beta=1.0), channels, v)
print("rates a[k, l] (k <- l):\n", np.round(table.a, 6))
print("\nI - 1:\n", np.round(table.I_minus_one, 6))
print("largest quadrature error estimate on I:", table.quad_err_max)

# I(k,l) I(l,k) = 1 is built in; the integrand identity is checked separately
print("I * I^T off the diagonal:", table.I[~np.eye(3, dtype=bool)] * table.I.T[~np.eye(3, dtype=bool)])
print("identity residual:", dbe_identity_check(table, channels).max_residual)

# weaker coupling pushes I toward 1 (the Born limit)
for lam in (1.0, 0.1, 0.01):
    t = rate_matrix(ThermalBath(1.0), channels, model.scaled(lam).coupling())
    print(f"lambda = {lam:<5}  max |I - 1| = {np.abs(t.I_minus_one).max():.3e}")
