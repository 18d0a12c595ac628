"""
Outcome strings of repeated measurement
=======================================

Measuring ``psi`` repeatedly with the family ``(1 + R)/2, (1 - R)/2`` built
from the cyclic shift ``R`` produces exchangeable outcome strings. Their law
is a mixture of i.i.d. laws over the Fourier modes of ``psi``.
"""

import numpy as np

from krausnd import (
    basis_vector,
    build_cyclic_example,
    definetti_check,
    empirical_measure,
    enumerate_measure,
    exchangeability_check,
    sample_strings,
    total_variation,
)

d, L = 8, 5
ex = build_cyclic_example(d, basis_vector(d, 0), L=L)
table = enumerate_measure(ex.family, ex.psi, L)
print("strings:", len(table), " total probability:", table.total)
print("largest deviation from the Fourier formula:", ex.max_abs_diff)
print("exchangeability gap:", exchangeability_check(ex.family, ex.psi, L))

###############################################################################
# The mixture weights are the squared overlaps of ``psi`` with the joint
# eigenvectors.

rep = definetti_check(ex.family, ex.psi, L)
print("weights:", np.round(rep.weights, 6))
print("mixture vs exact measure:", rep.max_abs_diff)

###############################################################################
# Monte Carlo trajectories agree with the exact law.

for n in (1_000, 10_000, 100_000):
    emp = empirical_measure(sample_strings(ex.family, ex.psi, L, n, seed=1), ex.family.m)
    print(f"{n:>7d} samples: total variation {total_variation(emp, table):.4f}")
