"""
What goes wrong with a truncated shift
======================================

Replacing the cyclic shift by the truncated shift ``S`` (no wrap around)
gives operators ``(1 + S)/2, (1 - S)/2`` that commute but are not normal.
The family is not normalized either, so nothing contradicts the theorem.
"""

import numpy as np

from krausnd import basis_vector, build_truncated_example, theorem_check

ex = build_truncated_example(3)
print("normalization defect:", ex.defect_norm)
print("normality defect of V_1:", ex.normality_defect, "  sqrt(2)/4 =", np.sqrt(2) / 4)
print(theorem_check(ex.family).summary())

###############################################################################
# Far from the edge the truncated shift acts like the cyclic one. A short
# measurement run started in the middle cannot tell them apart.

ex = build_truncated_example(6, basis_vector(6, 1), L=4, cyclic_dim=8)
print("largest probability difference against the cyclic family:", ex.no_leak_max_diff)
