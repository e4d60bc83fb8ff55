"""Inertial-like forward-backward splitting for ``0 in (A + B) x``."""

from .errors import (ConfigError, ConvergenceError, DimensionError,
                     InvalidArgument, InvalidSchedule, NotSingleValued,
                     NumericalError, ProxError)
from .hilbert import (Space, euclidean_space, inner, lincomb, make_grid_space,
                      norm)
from .operators import (LeastSquaresGradient, NormalConeAffineSet,
                        NormalConeL1Ball, Operator, ScalarAffine, ZeroOperator,
                        project_affine, project_l1_ball, read_matrix_csv,
                        spectral_norm_gram, write_matrix_csv)
from .schedules import (GibaliRule, Schedule, ValidationReport, evaluate,
                        gibali_alpha, parse_schedule, validate_role)
from .solvers import (Problem, RunRecord, StopRule, fb_step, run_alg31,
                      run_alg32, run_inertial_prox_gibali)
from .experiments import (EXAMPLE1_SOLUTION, EXAMPLE1_X0, EXAMPLE1_X1,
                          CSInstance, RecoveryMetrics, build_affine_min_norm,
                          build_cs_instance, build_example1, build_example2,
                          default_settings, recovery_metrics, table1, table2)

__version__ = "0.1.0"
