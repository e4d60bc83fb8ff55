"""Inertial-like forward-backward iterations for ``0 in (A + B) x``.

Three engines share one driver loop:

* :func:`run_alg31` -- ``w_n = x_{n-1} + theta_n (x_n - x_{n-1})`` followed by
  the forward-backward step ``x_{n+1} = J_tau^A (w_n - tau B w_n)``;
* :func:`run_alg32` -- the same extrapolation, then the relaxed update
  ``x_{n+1} = (1 - alpha_n - beta_n) w_n + alpha_n J_tau^A (w_n - tau B w_n)``,
  whose ``beta_n`` term pulls the limit to the minimum-norm solution;
* :func:`run_inertial_prox_gibali` -- classical inertial extrapolation
  ``y_n = x_n + a_n (x_n - x_{n-1})`` with the capped coefficient of
  :func:`~inertial_prox.schedules.gibali_alpha`.

Iteration ``n`` (starting at 1) is the ``n``-th application of the update, so
row ``n`` of a :class:`RunRecord` describes ``x_{n+1}``.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, InvalidSchedule, NumericalError
from .hilbert import Space, norm
from .operators import Operator
from .schedules import (GibaliRule, Schedule, gibali_alpha, require_role,
                        sample_indices, validate_role)

__all__ = [
    "Problem",
    "StopRule",
    "RunRecord",
    "fb_step",
    "run_alg31",
    "run_alg32",
    "run_inertial_prox_gibali",
    "STOP_KINDS",
]

STOP_KINDS = ("residual_step", "error_to_reference", "fixed_point_hit")
REFERENCE_RESIDUAL_TOL = 1e-8
# relative threshold for the "w_n == x_{n+1}" early exit
FIXED_POINT_RTOL = 1e-14


@dataclass
class Problem:
    """A splitting problem ``0 in (A + B) x``.

    ``B`` must be single-valued with cocoercivity constant ``gamma``; when not
    given, ``gamma`` is taken from ``B``.  A ``reference_solution`` is
    verified to be a fixed point of the forward-backward map.
    """

    space: Space
    A: Operator
    B: Operator
    gamma: Optional[float] = None
    reference_solution: Optional[np.ndarray] = None
    min_norm_solution: Optional[np.ndarray] = None
    name: str = "custom"

    def __post_init__(self):
        if not self.B.single_valued:
            raise InvalidArgument("B must be single-valued")
        if self.gamma is None:
            self.gamma = self.B.gamma
        if self.gamma is None or not self.gamma > 0:
            raise InvalidArgument("a positive cocoercivity constant is required")
        self.gamma = float(self.gamma)
        for attr in ("reference_solution", "min_norm_solution"):
            z = getattr(self, attr)
            if z is not None:
                z = self.space.check(z).copy()
                setattr(self, attr, z)
                res = self.fixed_point_residual(z)
                if res > REFERENCE_RESIDUAL_TOL:
                    raise InvalidArgument(
                        f"{attr} is not a solution (residual {res:.3e})")

    def fixed_point_residual(self, z, tau=None) -> float:
        tau = self.gamma if tau is None else tau
        return norm(self.space, z - fb_step(self, tau, z))

    def describe(self) -> dict:
        return {"name": self.name, "dimension": self.space.dimension,
                "space": self.space.kind, "gamma": self.gamma,
                "A": self.A.describe(), "B": self.B.describe()}


@dataclass(frozen=True)
class StopRule:
    kind: str = "residual_step"
    tol: float = 1e-4
    max_iter: int = 10_000

    def __post_init__(self):
        if self.kind not in STOP_KINDS:
            raise InvalidArgument(f"unknown stop rule '{self.kind}'")
        if not self.tol > 0:
            raise InvalidArgument("stop tolerance must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgument("max_iter must be a positive integer")


@dataclass
class RunRecord:
    """Per-iteration trace of a run plus how and where it ended."""

    n: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    error: list = field(default_factory=list)
    elapsed_ms: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    stop_reason: Optional[str] = None
    final_iterate: Optional[np.ndarray] = None
    config_echo: dict = field(default_factory=dict)
    iterates: Optional[list] = None

    @property
    def iterations(self) -> int:
        return self.n[-1] if self.n else 0

    @property
    def converged(self) -> bool:
        return self.stop_reason in ("tolerance_met", "fixed_point")

    def csv_rows(self, timing=True):
        header = ["n", "residual", "error"]
        if timing:
            header.append("elapsed_ms")
        header.extend(self.extras)
        rows = [header]
        for i, k in enumerate(self.n):
            row = [str(k), _fmt(self.residual[i]), _fmt(self.error[i])]
            if timing:
                row.append(_fmt(self.elapsed_ms[i]))
            row.extend(_fmt(col[i]) for col in self.extras.values())
            rows.append(row)
        return rows

    def to_csv(self, path, timing=True):
        """Write the trace.  ``timing=False`` drops the wall-clock column so
        that the file is reproducible byte for byte."""
        with open(path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(self.csv_rows(timing))

    def to_dict(self) -> dict:
        return {
            "stop_reason": self.stop_reason,
            "iterations": self.iterations,
            "final_iterate": None if self.final_iterate is None
            else [float(v) for v in self.final_iterate],
            "final_residual": self.residual[-1] if self.residual else None,
            "final_error": self.error[-1] if self.error else None,
            "elapsed_ms": self.elapsed_ms[-1] if self.elapsed_ms else 0.0,
            "config_echo": self.config_echo,
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(_jsonable(self.to_dict()), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _fmt(v) -> str:
    if v is None:
        return "nan"
    return f"{float(v):.17g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def fb_step(problem: Problem, tau: float, w) -> np.ndarray:
    """Forward-backward map ``J_tau^A (w - tau * B w)``."""
    if not 0.0 < tau < 2.0 * problem.gamma:
        raise InvalidArgument(
            f"step size {tau} outside (0, 2*gamma) = (0, {2 * problem.gamma})")
    w = np.asarray(w, dtype=float)
    return problem.A.resolvent(tau, w - tau * problem.B.forward(w))


def _error_target(problem, prefer_min_norm):
    if prefer_min_norm and problem.min_norm_solution is not None:
        return problem.min_norm_solution
    return problem.reference_solution


def _drive(problem: Problem, x0, x1, stop: StopRule,
           update: Callable, *, target, early_exit: bool,
           extra_names=(), echo=None, keep_iterates=False) -> RunRecord:
    space = problem.space
    x_prev = space.check(x0).copy()
    x_curr = space.check(x1).copy()
    if stop.kind == "error_to_reference" and target is None:
        raise InvalidArgument(
            "error_to_reference stopping needs a known solution on the problem")
    rec = RunRecord(extras={k: [] for k in extra_names},
                    config_echo=dict(echo or {}))
    rec.config_echo.setdefault("stop", {"kind": stop.kind, "tol": stop.tol,
                                        "max_iter": stop.max_iter})
    rec.config_echo.setdefault("problem", problem.describe())
    if keep_iterates:
        rec.iterates = [x_prev.copy(), x_curr.copy()]
    t0 = time.perf_counter()
    for n in range(1, int(stop.max_iter) + 1):
        w, x_next, extras = update(n, x_prev, x_curr)
        finite = np.all(np.isfinite(x_next))
        res = norm(space, x_next - x_curr) if finite else math.inf
        err = norm(space, x_next - target) if (finite and target is not None) else None
        rec.n.append(n)
        rec.residual.append(res)
        rec.error.append(err)
        rec.elapsed_ms.append((time.perf_counter() - t0) * 1e3)
        for k in extra_names:
            rec.extras[k].append(extras.get(k))
        if not finite:
            rec.stop_reason = "numerical_error"
            rec.final_iterate = x_curr
            raise NumericalError(f"non-finite iterate at n={n}", record=rec)
        if keep_iterates:
            rec.iterates.append(x_next.copy())
        x_prev, x_curr = x_curr, x_next

        gap = norm(space, w - x_next)
        if early_exit and gap <= FIXED_POINT_RTOL * (1.0 + norm(space, w)):
            rec.stop_reason = "fixed_point"
        elif stop.kind == "fixed_point_hit" and gap <= stop.tol:
            rec.stop_reason = "fixed_point"
        elif stop.kind == "residual_step" and res < stop.tol:
            rec.stop_reason = "tolerance_met"
        elif stop.kind == "error_to_reference" and err <= stop.tol:
            rec.stop_reason = "tolerance_met"
        if rec.stop_reason:
            break
    else:
        rec.stop_reason = "max_iter"
    rec.final_iterate = x_curr
    return rec


def _check_tau(problem, tau, tau_margin):
    require_role(tau, "tau", "tau", gamma=problem.gamma, eps=tau_margin)


def run_alg31(problem: Problem, theta: Schedule, tau: Schedule, x0, x1,
              stop: StopRule = StopRule(), *, tau_margin=0.0, echo=None,
              keep_iterates=False) -> RunRecord:
    """Inertial-like forward-backward iteration (weakly convergent variant).

    Stops early when ``w_n`` and ``x_{n+1}`` coincide, since ``x_{n+1}`` is
    then a solution.
    """
    require_role(theta, "theta", "theta")
    _check_tau(problem, tau, tau_margin)

    def update(n, x_prev, x_curr):
        th = theta(n)
        w = x_prev + th * (x_curr - x_prev)
        return w, fb_step(problem, tau(n), w), {}

    echo = {"algorithm": "alg31", "theta": str(theta), "tau": str(tau),
            "tau_margin": tau_margin, **(echo or {})}
    return _drive(problem, x0, x1, stop, update,
                  target=_error_target(problem, False), early_exit=True,
                  echo=echo, keep_iterates=keep_iterates)


def theta_case(theta: Schedule) -> str:
    """Which of the admissible inertia cases ``theta`` falls in."""
    for role in ("theta_case_I", "theta_case_II", "theta_case_III"):
        if validate_role(theta, role):
            return role
    raise InvalidSchedule(
        f"theta schedule '{theta}' fits none of cases I (liminf theta(1-theta) > 0), "
        "II (theta = 0) or III (theta = 1)")


def _check_alpha_beta(alpha, beta):
    require_role(alpha, "alpha", "alpha")
    require_role(beta, "beta", "beta")
    horizon = min(h for h in (alpha.horizon, beta.horizon, 10**6) if h)
    for n in sample_indices(horizon):
        if alpha(int(n)) + beta(int(n)) >= 1.0:
            raise InvalidSchedule(f"alpha_n + beta_n >= 1 at n={n}")


def run_alg32(problem: Problem, theta: Schedule, alpha: Schedule,
              beta: Schedule, tau: Schedule, x0, x1,
              stop: StopRule = StopRule(), *, tau_margin=0.0, echo=None,
              keep_iterates=False) -> RunRecord:
    """Relaxed inertial-like iteration converging to the minimum-norm solution.

    When the problem knows its minimum-norm solution the error column is the
    distance to it; otherwise the distance to ``reference_solution``.
    """
    case = theta_case(theta)
    _check_alpha_beta(alpha, beta)
    _check_tau(problem, tau, tau_margin)

    def update(n, x_prev, x_curr):
        w = x_prev + theta(n) * (x_curr - x_prev)
        z = fb_step(problem, tau(n), w)
        a, b = alpha(n), beta(n)
        return w, (1.0 - a - b) * w + a * z, {}

    echo = {"algorithm": "alg32", "theta": str(theta), "theta_case": case,
            "alpha": str(alpha), "beta": str(beta), "tau": str(tau),
            "tau_margin": tau_margin, **(echo or {})}
    return _drive(problem, x0, x1, stop, update,
                  target=_error_target(problem, True), early_exit=False,
                  echo=echo, keep_iterates=keep_iterates)


def run_inertial_prox_gibali(problem: Problem, rule: GibaliRule,
                             lam: Schedule, x0, x1,
                             stop: StopRule = StopRule(), *, tau_margin=0.0,
                             echo=None, keep_iterates=False) -> RunRecord:
    """Classical inertial forward-backward baseline with a capped inertia.

    The realised coefficient of every iteration is kept in the ``alpha``
    column of the record.
    """
    _check_tau(problem, lam, tau_margin)
    space = problem.space

    def update(n, x_prev, x_curr):
        d = x_curr - x_prev
        a = gibali_alpha(rule, n, norm(space, d) ** 2)
        y = x_curr + a * d
        return y, fb_step(problem, lam(n), y), {"alpha": a}

    echo = {"algorithm": "inertial_prox_gibali", "gibali_cap": rule.cap,
            "gibali_eps": str(rule.eps), "tau": str(lam),
            "tau_margin": tau_margin, **(echo or {})}
    return _drive(problem, x0, x1, stop, update,
                  target=_error_target(problem, False), early_exit=True,
                  extra_names=("alpha",), echo=echo,
                  keep_iterates=keep_iterates)
