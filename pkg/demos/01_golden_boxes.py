"""
Dimension bounds of textbook boxes
==================================

Closed-form correlations whose bounds are known by hand: perfectly
correlated computational-basis statistics, the GHZ box and the
multiparty PR box.
"""

import numpy as np

from dimbound import dimension_bound, generate

###############################################################################
# Perfect agreement between parties on ``d`` outcomes certifies dimension d.

for d in range(2, 6):
    c = generate("maxent-cb", parties=3, d=d)
    print(f"maxent-cb d={d}: bound {dimension_bound(c).bound:.6f}")

###############################################################################
# The GHZ box gives 2 however many Bobs help, since each added party only
# reshuffles the qubit's correlations.

for n in range(3, 7):
    r = dimension_bound(generate("ghz", parties=n))
    print(f"ghz n={n}: bound {r.bound:.6f}, argmin {r.argmin}")

###############################################################################
# A PR box lets the Bobs learn Alice's outcome perfectly for every pair of
# her settings, which no finite quantum system allows.

r = dimension_bound(generate("prbox", parties=3))
print("prbox:", r.bound, "denominator", r.denominator)
print(np.round(r.ams_table, 6))
