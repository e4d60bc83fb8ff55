# %% [markdown]
# # Sparse recovery with an l1 constraint
#
# Find x with |x|_1 <= t minimising |Tx - b|^2. The constraint enters as the
# normal cone of the l1 ball (its resolvent is the projection) and the data
# term as the gradient of the least-squares loss.

# %%
import numpy as np

from inertial_prox import build_cs_instance, default_settings, recovery_metrics, run_alg31

inst, problem = build_cs_instance(m=64, n=256, K=8, seed=3)
s = default_settings("cs", problem.gamma)
x0 = np.zeros(256)
rec = run_alg31(problem, s["theta"], s["tau"], x0, x0, s["stop"])
print(recovery_metrics(rec.final_iterate, inst, rec))

# %% [markdown]
# With 40 nonzeros and only 64 measurements the ball of radius K - 0.001
# already contains many signals that fit the data exactly. The solvers still
# converge, but to one of those signals rather than to x_true.

# %%
inst, problem = build_cs_instance(m=64, n=256, K=40, seed=0)
s = default_settings("cs", problem.gamma)
rec = run_alg31(problem, s["theta"], s["tau"], x0, x0, s["stop"])
m = recovery_metrics(rec.final_iterate, inst, rec)
print(f"iterations={rec.iterations} residual |Tx-b|={np.linalg.norm(inst.T @ rec.final_iterate - inst.b):.2e}")
print(f"rel_error={m.rel_error:.3f} recall={m.support_recall:.2f}")
