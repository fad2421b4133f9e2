"""
Scattering off a three-dot triangle
===================================

A free particle hits a flux-threaded triangle of quantum dots. We solve the
point-contact scattering problem exactly and look at three ways the T matrix
fails to be "nice": it is not Hermitian, not symmetric, and its moduli are
not time-reversal symmetric.
"""

import numpy as np

from detbal import reference_triangle, solve_channel_amplitudes, t_matrix
from detbal.scattering import (closed_form_amplitudes_3ch, hermiticity_defect,
                               symmetry_defect, time_reversal_defect)

model = reference_triangle()
channels, v = model.channels(), model.coupling()
print("levels (-, 0, +):", channels.eps)
print("coupling in the eigenbasis:\n", np.round(v.v, 4))

# all three channels are open above eps_+ = 0.5
E = 1.2
T = t_matrix(E, v, channels)
print("\nT at E =", E)
print(np.round(T, 5))

# two independent routes to the same amplitudes
sol = solve_channel_amplitudes(E, 0, v, channels)
closed = closed_form_amplitudes_3ch(E, 0, v, channels)
print("\nlinear solve vs closed form, max diff:", np.abs(sol.psi - closed).max())

# the defects over a small energy grid, pair (+, 0)
grid = np.linspace(0.6, 3.0, 5)
print("\n  E     |T-T^dag|   |T-T^T|    |T+0|^2-|T0+|^2")
for e, h, s, r in zip(grid, hermiticity_defect(grid, 2, 1, v, channels),
                      symmetry_defect(grid, 2, 1, v, channels),
                      time_reversal_defect(grid, 2, 1, v, channels)):
    print(f"{e:5.2f}  {abs(h):.3e}  {abs(s):.3e}  {r:+.3e}")

# equal contacts on dots 2 and 3 remove the asymmetry entirely
sym = model.__class__((1.0, 0.7, 0.7), energies=model.energies)
print("\nwith V2 = V3, max |T+0|^2-|T0+|^2:",
      np.abs(time_reversal_defect(grid, 2, 1, sym.coupling(), channels)).max())
