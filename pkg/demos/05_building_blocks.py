# %% [markdown]
# # Building blocks: schedules, projections, spectral norms

# %%
import numpy as np

from inertial_prox import GibaliRule, Schedule, parse_schedule, validate_role
from inertial_prox.operators import project_l1_ball, spectral_norm_gram

theta = parse_schedule("paper_quintic")
print([round(theta(n), 6) for n in (1, 2, 3, 10)])
report = validate_role(theta, "theta_case_I")
print(report.valid, report.theta_product_lower_bound)

# the inertial parameter may not reach 1 from below in case I
print(validate_role(Schedule.constant(1), "theta_case_I").failures)

# %%
x = np.array([3.0, 1.0, -0.5])
print(project_l1_ball(x, 2.0))

rng = np.random.default_rng(0)
T = rng.standard_normal((30, 80))
lam = spectral_norm_gram(T)
print(lam, np.linalg.eigvalsh(T.T @ T).max())

# %%
rule = GibaliRule(cap=0.5)
print(rule.eps_partial_sum(1000), np.pi ** 2 / 6)
