"""Problem builders and metrics for the three reference experiments.

* ``example1`` -- a strongly monotone affine problem in R^3 with unique
  solution (0.3, -0.6, 0);
* ``example2`` -- linear diagonal operators on L^2([0, 1]) discretised on a
  uniform grid, solution the zero function;
* ``cs`` -- constrained LASSO ``min ||Tx - b||^2 s.t. ||x||_1 <= t`` for a
  random Gaussian sensing matrix and a K-spike signal.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DimensionError, InvalidArgument
from .hilbert import euclidean_space, make_grid_space
from .operators import (LeastSquaresGradient, NormalConeAffineSet,
                        NormalConeL1Ball, ScalarAffine, ZeroOperator,
                        read_matrix_csv, write_matrix_csv)
from .schedules import GibaliRule, Schedule
from .solvers import (Problem, RunRecord, StopRule, run_alg31, run_alg32,
                      run_inertial_prox_gibali)

__all__ = [
    "EXAMPLE1_SOLUTION", "EXAMPLE1_X0", "EXAMPLE1_X1",
    "build_example1", "build_example2", "build_affine_min_norm",
    "CSInstance", "build_cs_instance", "RecoveryMetrics", "recovery_metrics",
    "default_settings", "table1", "table2", "markdown_table",
]

EXAMPLE1_SOLUTION = np.array([0.3, -0.6, 0.0])
EXAMPLE1_X0 = np.array([0.1, -0.2, 0.1])
EXAMPLE1_X1 = np.array([0.2, 0.1, -0.3])
DEFAULT_GRID = 1024

# initial functions (x0, x1) for the three L^2 cases
EXAMPLE2_CASES = {
    1: (lambda t: (np.sin(-3 * t) + np.cos(-5 * t)) / 2,
        lambda t: 2 * np.sin(5 * t)),
    2: (lambda t: 2 * t * np.sin(3 * t) * np.exp(-5 * t) / 200,
        lambda t: t ** 2 - np.exp(-2 * t)),
    3: (lambda t: 2 * t ** 3 * np.exp(5 * t),
        lambda t: np.exp(t) * np.sin(3 * t) / 100),
}


def build_example1(gamma: Optional[float] = None) -> Problem:
    """``A x = 3x`` and ``B x = x/3 + (-1, 2, 0)`` on R^3.

    ``B`` is 3-cocoercive; pass ``gamma`` to use a different (smaller)
    constant.
    """
    A = ScalarAffine(3.0)
    B = ScalarAffine(1.0 / 3.0, shift=[-1.0, 2.0, 0.0])
    return Problem(euclidean_space(3), A, B, gamma=gamma,
                   reference_solution=EXAMPLE1_SOLUTION,
                   min_norm_solution=EXAMPLE1_SOLUTION, name="example1")


def build_example2(N: int = DEFAULT_GRID, case: int = 1,
                   gamma: Optional[float] = None):
    """``A x = 3x/4`` and ``B x = x/2`` on a grid of ``N + 1`` nodes.

    Returns
    -------
    problem : Problem
    x0, x1 : ndarray
        The chosen case's initial functions sampled at the nodes.
    """
    if case not in EXAMPLE2_CASES:
        raise InvalidArgument(f"unknown initial-function case {case!r}")
    if int(N) != N or N < 2:
        raise InvalidArgument(f"grid size must be at least 2, got {N}")
    space = make_grid_space(int(N))
    zero = space.zeros()
    problem = Problem(space, ScalarAffine(0.75), ScalarAffine(0.5), gamma=gamma,
                      reference_solution=zero, min_norm_solution=zero,
                      name=f"example2_case{case}")
    f0, f1 = EXAMPLE2_CASES[case]
    return problem, space.sample(f0), space.sample(f1)


def build_affine_min_norm(normal=(1.0, 0.0), offset=1.0, gamma=1.0) -> Problem:
    """Normal cone of a hyperplane plus ``B = 0``; every point of the
    hyperplane solves, the minimum-norm one is its projection of the origin."""
    normal = np.asarray(normal, dtype=float)
    A = NormalConeAffineSet(normal, offset)
    z = offset * normal / (normal @ normal)
    return Problem(euclidean_space(normal.size), A, ZeroOperator(gamma),
                   reference_solution=z, min_norm_solution=z,
                   name="affine_min_norm")


@dataclass
class CSInstance:
    T: np.ndarray
    b: np.ndarray
    x_true: np.ndarray
    K: int
    t: float
    noise_sigma: float
    seed: int

    @property
    def shape(self):
        return self.T.shape

    def meta(self) -> dict:
        m, n = self.T.shape
        return {"m": m, "n": n, "K": self.K, "t": self.t,
                "sigma": self.noise_sigma, "seed": self.seed}

    def save(self, directory):
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        write_matrix_csv(d / "T.csv", self.T)
        write_matrix_csv(d / "b.csv", self.b)
        write_matrix_csv(d / "x_true.csv", self.x_true)
        (d / "meta.json").write_text(json.dumps(self.meta(), indent=2) + "\n")

    @classmethod
    def load(cls, directory) -> "CSInstance":
        d = Path(directory)
        meta = json.loads((d / "meta.json").read_text())
        T = read_matrix_csv(d / "T.csv")
        b = read_matrix_csv(d / "b.csv").ravel()
        x = read_matrix_csv(d / "x_true.csv").ravel()
        if T.shape != (meta["m"], meta["n"]):
            raise DimensionError(f"T.csv has shape {T.shape}, meta says "
                                 f"({meta['m']}, {meta['n']})")
        return cls(T, b, x, int(meta["K"]), float(meta["t"]),
                   float(meta["sigma"]), int(meta["seed"]))

    def problem(self, gram_norm=None) -> Problem:
        n = self.T.shape[1]
        return Problem(euclidean_space(n), NormalConeL1Ball(self.t),
                       LeastSquaresGradient(self.T, self.b, gram_norm=gram_norm),
                       name="cs")


def build_cs_instance(m: int, n: int, K: int, noise_sigma: float = 0.0,
                      seed: int = 0, t: Optional[float] = None):
    """Random sparse-recovery instance and its splitting problem.

    ``T`` has i.i.d. standard normal entries, ``x_true`` has ``K`` spikes of
    amplitude +-1 at uniformly drawn positions, and ``b = T x_true + noise``.
    The l1 budget defaults to ``K - 0.001``.
    """
    if not (1 <= K < n and 1 <= m < n):
        raise InvalidArgument(f"need 1 <= K < n and 1 <= m < n, got m={m}, n={n}, K={K}")
    if noise_sigma < 0:
        raise InvalidArgument("noise_sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((m, n))
    support = rng.choice(n, size=K, replace=False)
    x_true = np.zeros(n)
    x_true[support] = 2.0 * rng.integers(0, 2, size=K) - 1.0
    b = T @ x_true
    if noise_sigma > 0:
        b = b + noise_sigma * rng.standard_normal(m)
    inst = CSInstance(T, b, x_true, int(K), K - 0.001 if t is None else float(t),
                      float(noise_sigma), int(seed))
    return inst, inst.problem()


@dataclass
class RecoveryMetrics:
    l2_error: float
    rel_error: float
    support_precision: float
    support_recall: float
    iterations: int
    wall_ms: float

    def to_dict(self):
        return dict(self.__dict__)


def recovery_metrics(xhat, inst: CSInstance, record: Optional[RunRecord] = None,
                     threshold: float = 0.5) -> RecoveryMetrics:
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape != inst.x_true.shape:
        raise DimensionError(f"estimate shape {xhat.shape} vs signal {inst.x_true.shape}")
    err = float(np.linalg.norm(xhat - inst.x_true))
    found = np.abs(xhat) > threshold
    true = inst.x_true != 0
    hits = int(np.sum(found & true))
    precision = hits / found.sum() if found.any() else 0.0
    recall = hits / true.sum() if true.any() else 1.0
    return RecoveryMetrics(
        l2_error=err,
        rel_error=err / float(np.linalg.norm(inst.x_true)),
        support_precision=float(precision),
        support_recall=float(recall),
        iterations=record.iterations if record else 0,
        wall_ms=record.elapsed_ms[-1] if record and record.elapsed_ms else 0.0,
    )


def default_settings(experiment: str, gamma: float) -> dict:
    """Schedules and stopping rule used for each experiment unless overridden."""
    tau = Schedule.constant(gamma)
    s = {"theta": Schedule.paper_quintic(), "alpha": Schedule.paper_alpha(),
         "beta": Schedule.harmonic(), "tau": tau, "gibali": GibaliRule()}
    if experiment == "example1":
        s["stop"] = StopRule("error_to_reference", 1e-5, 500)
    elif experiment == "example2":
        s["stop"] = StopRule("residual_step", 1e-4, 200)
    elif experiment == "cs":
        s["beta"] = Schedule.scaled(1e-3)
        s["stop"] = StopRule("residual_step", 1e-4, 10_000)
    else:
        s["stop"] = StopRule()
    return s


def _run(algorithm, problem, settings, x0, x1, stop=None):
    stop = stop or settings["stop"]
    if algorithm == "alg31":
        return run_alg31(problem, settings["theta"], settings["tau"], x0, x1, stop)
    if algorithm == "alg32":
        return run_alg32(problem, settings["theta"], settings["alpha"],
                         settings["beta"], settings["tau"], x0, x1, stop)
    if algorithm == "inertial_prox_gibali":
        return run_inertial_prox_gibali(problem, settings["gibali"],
                                        settings["tau"], x0, x1, stop)
    raise InvalidArgument(f"unknown algorithm '{algorithm}'")


ALGORITHMS = ("alg31", "alg32", "inertial_prox_gibali")
ALGORITHM_LABELS = {"alg31": "Inertial-like FB", "alg32": "Relaxed inertial-like FB",
                    "inertial_prox_gibali": "Inertial-prox (capped)"}


def markdown_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def table1(N: int = DEFAULT_GRID, case: int = 2, gamma=None,
           thresholds=(1e-3, 1e-4, 1e-5), max_iter=10_000):
    """Iterations and seconds needed on the L^2 problem to bring the step
    residual below each threshold."""
    problem, x0, x1 = build_example2(N, case, gamma)
    settings = default_settings("example2", problem.gamma)
    stop = StopRule("residual_step", min(thresholds), max_iter)
    records = {a: _run(a, problem, settings, x0, x1, stop) for a in ALGORITHMS}
    header = ["Error"] + [f"Iter. {ALGORITHM_LABELS[a]}" for a in ALGORITHMS] \
        + [f"CPU s {ALGORITHM_LABELS[a]}" for a in ALGORITHMS]
    rows = []
    for eps in thresholds:
        its, secs = [], []
        for a in ALGORITHMS:
            rec = records[a]
            hit = next((i for i, r in enumerate(rec.residual) if r < eps), None)
            its.append("-" if hit is None else rec.n[hit])
            secs.append("-" if hit is None else f"{rec.elapsed_ms[hit] / 1e3:.4f}")
        rows.append([f"{eps:.0e}"] + its + secs)
    return header, rows, records


CS_SIZES = ((40, 64, 256), (60, 128, 512))


def table2(seed: int = 0, sizes=CS_SIZES, noise_sigma=0.0, max_iter=10_000):
    """Iterations, seconds and recovery quality on the sparse-recovery problem."""
    header = ["Method"]
    for K, m, n in sizes:
        header += [f"Iter. (K={K},m={m},n={n})", "Sec.", "rel. error", "recall"]
    cells = {a: [ALGORITHM_LABELS[a]] for a in ALGORITHMS}
    metrics = {}
    for K, m, n in sizes:
        inst, problem = build_cs_instance(m, n, K, noise_sigma, seed)
        settings = default_settings("cs", problem.gamma)
        stop = StopRule("residual_step", 1e-4, max_iter)
        x0 = np.zeros(n)
        for a in ALGORITHMS:
            t0 = time.perf_counter()
            rec = _run(a, problem, settings, x0, x0, stop)
            secs = time.perf_counter() - t0
            met = recovery_metrics(rec.final_iterate, inst, rec)
            metrics[(a, K, m, n)] = met
            cells[a] += [rec.iterations, f"{secs:.4f}", f"{met.rel_error:.3e}",
                         f"{met.support_recall:.3f}"]
    return header, [cells[a] for a in ALGORITHMS], metrics
