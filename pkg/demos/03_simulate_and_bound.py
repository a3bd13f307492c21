"""
From a quantum experiment to a dimension bound
==============================================

Simulate three parties sharing a qutrit maximally entangled state, each
measuring in random real bases, then ask how large Alice's system must be.
"""

import numpy as np

from dimbound import (
    QuantumScenario,
    born_correlation,
    builtin_state,
    check_no_signalling,
    dimension_bound,
    dimension_bound_grouped,
    random_measurement_set,
    round_bound,
)

seeds = np.random.SeedSequence(7).spawn(3)
ms = tuple(random_measurement_set(3, 3, s) for s in seeds)
c = born_correlation(QuantumScenario(builtin_state("maxent", 3, 3), ms))
print("\n".join(check_no_signalling(c).lines()))

r = dimension_bound(c)
print(r.format_table())

###############################################################################
# The bound never exceeds the true dimension 3; rounding up gives the
# smallest dimension consistent with the data.

print("rounded:", round_bound(r.bound))
print("grouped:", dimension_bound_grouped(c).bound)
