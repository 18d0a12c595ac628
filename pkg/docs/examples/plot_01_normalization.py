"""
Normalized Kraus families and the norm of the map
=================================================

A Kraus family is a list of square matrices ``V_a`` whose sum of
``V_a^* V_a`` is the identity. Here we build one at random, confirm the
normalization and look at how large the Heisenberg map can make its input.
"""

import numpy as np

from krausnd import norm_identity_check, random_kraus_isometry, validate

F = random_kraus_isometry(4, 3, seed=7)
rep = validate(F)
print(rep.summary())
print("defect ||sum V*V - Id|| =", rep.defect_norm)

###############################################################################
# The norm of ``X -> sum V^* X V`` is reached at the identity. Random probes
# never exceed it.

nid = norm_identity_check(F, trials=200, seed=0)
print(f"bound {nid.bound:.15f}, largest probed ratio {nid.max_ratio:.15f}")
print("attained at the identity:", nid.attained_at_identity)

###############################################################################
# Break the normalization by scaling one operator and the report notices.

from krausnd import KrausFamily

ops = F.ops.copy()
ops[0] *= 1.1
print(validate(KrausFamily(ops)).summary())
