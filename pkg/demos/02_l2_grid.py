# %% [markdown]
# # Diagonal operators on L^2([0, 1])
#
# Functions live on a 1024-node grid with trapezoid weights. A multiplies by
# 2 and B by 1/2, so the zero function is the unique solution. Three initial
# functions are tried.

# %%
from inertial_prox import build_example2, default_settings, norm, run_alg31, run_alg32
from inertial_prox.experiments import markdown_table, table1

for case in (1, 2, 3):
    problem, x0, x1 = build_example2(1024, case, gamma=0.5)
    s = default_settings("example2", problem.gamma)
    a = run_alg31(problem, s["theta"], s["tau"], x0, x1, s["stop"])
    b = run_alg32(problem, s["theta"], s["alpha"], s["beta"], s["tau"], x0, x1, s["stop"])
    print(f"case {case}: alg31 {a.iterations:3d} its |x|={norm(problem.space, a.final_iterate):.1e}"
          f"   alg32 {b.iterations:3d} its |x|={norm(problem.space, b.final_iterate):.1e}")

# %% [markdown]
# Iterations and time needed for three residual thresholds, including the
# capped inertial baseline.

# %%
header, rows, _ = table1(N=1024, case=2, gamma=0.5)
print(markdown_table(header, rows))
