# %% [markdown]
# # Which solution do we get?
#
# Omega = {x : x_1 = 1} is a whole line. The plain inertial-like solver
# stops at whichever point of the line it reaches first. The relaxed solver
# is anchored at the origin and converges to the closest point, (1, 0).

# %%
import numpy as np

from inertial_prox import (Schedule, StopRule, build_affine_min_norm, run_alg31,
                           run_alg32)

problem = build_affine_min_norm()
one, tau = Schedule.constant(1), Schedule.constant(1.0)

weak = run_alg31(problem, one, tau, (5, 7), (5, 7), StopRule("residual_step", 1e-12, 100))
print("alg31 from (5, 7):", weak.final_iterate)

for start in ((5, 7), (-3, 2)):
    rec = run_alg32(problem, one, Schedule.paper_alpha(), Schedule.harmonic(), tau,
                    start, start, StopRule("error_to_reference", 1e-3, 20_000))
    print(f"alg32 from {start}: {np.round(rec.final_iterate, 4)} after {rec.iterations} its")
