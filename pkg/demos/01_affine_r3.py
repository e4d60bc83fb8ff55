# %% [markdown]
# # A strongly monotone problem in R^3
#
# A x = 3x and B x = x/3 + (-1, 2, 0), so the only zero of A + B is
# (0.3, -0.6, 0). We run both inertial-like solvers and look at the error.

# %%
from inertial_prox import (EXAMPLE1_X0, EXAMPLE1_X1, Schedule, StopRule,
                           build_example1, run_alg31, run_alg32)

# B is 3-cocoercive, but tau = 3 makes the forward-backward map constant;
# the conservative constant 1/3 gives an actual trajectory
problem = build_example1(gamma=1 / 3)
print(problem.describe())

# %%
stop = StopRule("error_to_reference", 1e-5, 500)
tau = Schedule.constant(problem.gamma)
for theta in (Schedule.paper_quintic(), Schedule.constant(0), Schedule.constant(1)):
    rec = run_alg31(problem, theta, tau, EXAMPLE1_X0, EXAMPLE1_X1, stop)
    print(f"theta={theta!s:15} iterations={rec.iterations:4d} "
          f"final error={rec.error[-1]:.2e}")

# %% [markdown]
# The relaxed solver pulls every step towards the origin by beta_n = 1/(n+1).
# The anchor fades slowly, so the error decays like 1/n: n * error levels off.

# %%
rec = run_alg32(problem, Schedule.paper_quintic(), Schedule.paper_alpha(),
                Schedule.harmonic(), tau, EXAMPLE1_X0, EXAMPLE1_X1,
                StopRule("error_to_reference", 1e-5, 5000))
for n in (10, 100, 1000, 5000):
    print(n, f"{rec.error[n - 1]:.2e}", f"n*err={n * rec.error[n - 1]:.3f}")
