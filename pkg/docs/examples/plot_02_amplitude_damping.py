"""
Fast and decaying parts of amplitude damping
============================================

Amplitude damping with rate ``gamma = 1/2`` leaks the excited level into the
ground level. The ground level carries the stationary state and the excited
level is transient.
"""

import numpy as np

from krausnd import amplitude_damping, decompose, verify_decomposition

F = amplitude_damping(0.5)
D = decompose(F)
print("dim H_F =", D.dim_F, " dim H_D =", D.dim_D)
print("stationary state:\n", np.round(D.rho.rho, 12))
print("spectral radius on H_D:", D.spectral_radius_D)

###############################################################################
# In the adapted basis every operator is block upper triangular.

for a in range(F.m):
    print(f"V_{a + 1} in the adapted basis:\n", np.round(D.to_basis(F.ops[a]), 12))

###############################################################################
# The occupation of ``H_D`` falls by half at every step.

rep = verify_decomposition(F, D, steps=12)
for k, x in enumerate(rep.transience_decay):
    print(f"k={k:2d}  occupation {x:.6e}  ratio to 2^-k {x * 2.0 ** k:.3f}")
print("all structural checks:", rep.all_ok)
