"""
A single observable behind a commuting family
=============================================

For a commuting family of normal matrices we find a joint eigenbasis and a
Hermitian ``N`` with ``V_a = f_a(N)`` for every outcome ``a``.
"""

import numpy as np

from krausnd import build_witness, random_commuting_normal, simultaneous_diagonalize

F = random_commuting_normal(5, 3, seed=11)
J = simultaneous_diagonalize(F)
print("joint eigenvalue classes:", J.classes)
print("off-diagonal residuals in the joint basis:", J.offdiag_residuals)

W = build_witness(J)
print("eigenvalues of N:", W.lambda_values)
print("f_a evaluated on each eigenvalue of N:\n", np.round(W.f_table, 6))
print("relative reconstruction errors:", W.relative_errors(F))
