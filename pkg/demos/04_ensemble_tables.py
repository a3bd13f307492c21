"""
Averages over random measurements
=================================

Average bounds over 100 random trials for several shared states.  Set
``DIMBOUND_WORKERS`` to use more processes.
"""

from dimbound import ensemble_run

for state in ("maxent", "weighted", "classical"):
    for d in (2, 3, 4):
        r = ensemble_run(state, d, trials=100, seed=0)
        print(f"{state:9s} d={d}  rounded {r.mean_rounded:.2f}  exact {r.mean_exact:.3f}")

###############################################################################
# Keeping track of the Bobs separately beats fusing them.

for d in (2, 3, 4):
    r = ensemble_run("maxent", d, trials=100, seed=0)
    print(f"d={d}  multiparty {r.mean_exact:.3f}  grouped {r.mean_grouped:.3f}  outperform {r.outperform_exact}")

r = ensemble_run("dicke3", 3, trials=100, seed=0)
print(f"dicke3  rounded {r.mean_rounded:.2f}  exact {r.mean_exact:.3f}")
