"""
Commuting normalized families are normal
========================================

``theorem_check`` runs the full chain of block and defect identities on a
family. We try it on a random commuting normal family and on amplitude
damping, whose operators do not commute.
"""

from krausnd import amplitude_damping, random_commuting_normal, theorem_check

F = random_commuting_normal(6, 3, seed=5)
rep = theorem_check(F)
print(rep.summary())
for step in rep.proof_trace:
    print(f"  {step.name:<40s} residual {step.residual:.2e}  {'ok' if step.ok else 'FAIL'}")

###############################################################################
# Amplitude damping is normalized but its operators fail to commute, so the
# hypotheses do not hold and no claim is made.

rep = theorem_check(amplitude_damping(0.5))
print(rep.summary())
print("failed hypotheses:", rep.failed_hypotheses)
