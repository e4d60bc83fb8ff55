"""Command-line front end.

::

    prox run CONFIG [CONFIG ...] [--out DIR] [--seed S] [--jobs K]
    prox validate CONFIG [CONFIG ...]
    prox table1 [--out DIR] [--grid N] [--case C] [--gamma G]
    prox table2 [--out DIR] [--seed S]

Configuration files are flat ``key = value`` lines; ``#`` starts a comment and
values may be quoted.  Unknown keys are rejected.
"""
from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, NumericalError, ProxError
from .experiments import (EXAMPLE1_X0, EXAMPLE1_X1, ALGORITHMS,
                          build_cs_instance, build_example1, build_example2,
                          default_settings, markdown_table, recovery_metrics,
                          table1, table2)
from .hilbert import euclidean_space
from .operators import (LeastSquaresGradient, NormalConeAffineSet,
                        NormalConeL1Ball, ScalarAffine, ZeroOperator,
                        read_matrix_csv, write_matrix_csv)
from .schedules import GibaliRule, Schedule, parse_schedule
from .solvers import STOP_KINDS, Problem, StopRule, run_alg31, run_alg32, \
    run_inertial_prox_gibali

EXPERIMENTS = ("example1", "example2", "cs", "custom")
EXIT_OK, EXIT_ERROR, EXIT_MAX_ITER = 0, 1, 2


@dataclass
class RunConfig:
    experiment: str = "example1"
    algorithm: str = "alg31"
    theta: Optional[Schedule] = None
    alpha: Optional[Schedule] = None
    beta: Optional[Schedule] = None
    tau: Optional[Schedule] = None
    tau_margin: float = 0.0
    gibali_cap: Optional[float] = None
    gibali_eps: Optional[Schedule] = None
    stop: Optional[str] = None
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    seed: int = 0
    out: Optional[str] = None
    gamma: Optional[float] = None
    # example2
    grid_n: int = 1024
    case: int = 1
    # cs
    m: int = 64
    n: int = 256
    K: int = 40
    noise_sigma: float = 0.0
    l1_radius: Optional[float] = None
    # custom
    A: Optional[str] = None
    B: Optional[str] = None
    x0: Optional[tuple] = None
    x1: Optional[tuple] = None
    reference: Optional[tuple] = None
    min_norm: Optional[tuple] = None
    base_dir: Optional[str] = dataclasses.field(default=None, compare=False)

    def to_mapping(self) -> dict:
        """String form of every field that differs from ``None``."""
        out = {}
        for f in dataclasses.fields(self):
            if f.name == "base_dir":
                continue
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, Schedule):
                v = v.to_string()
            elif isinstance(v, tuple):
                v = ",".join(repr(float(c)) for c in v)
            elif isinstance(v, float):
                v = repr(v)
            out[f.name] = str(v)
        return out

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.to_mapping().items())


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig) if f.name != "base_dir"}
_SCHEDULE_KEYS = ("theta", "alpha", "beta", "tau", "gibali_eps")
_INT_KEYS = ("max_iter", "seed", "grid_n", "case", "m", "n", "K")
_FLOAT_KEYS = ("tau_margin", "gibali_cap", "tol", "gamma", "noise_sigma", "l1_radius")
_VECTOR_KEYS = ("x0", "x1", "reference", "min_norm")


def _convert(key, raw, line):
    try:
        if key in _SCHEDULE_KEYS:
            return parse_schedule(raw)
        if key in _INT_KEYS:
            v = float(raw)
            if v != int(v):
                raise ValueError(f"expected an integer, got {raw}")
            return int(v)
        if key in _FLOAT_KEYS:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError("value must be finite")
            return v
        if key in _VECTOR_KEYS:
            return tuple(float(c) for c in raw.split(","))
    except (ValueError, ProxError) as exc:
        raise ConfigError(str(exc), key=key, line=line) from None
    return raw


def _schedule_positive(s: Schedule) -> bool:
    inf = s._facts()[0]
    return inf > 0 or (inf == 0 and not s._facts()[1])


def parse_config(text: str, base_dir=None) -> RunConfig:
    """Parse and validate a flat ``key = value`` configuration."""
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, val = body.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError("expected 'key = value'", line=lineno)
        if key not in _FIELDS:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in values:
            raise ConfigError("duplicate key", key=key, line=lineno)
        val = val.strip().strip('"').strip("'").strip()
        values[key] = _convert(key, val, lineno)
        lines[key] = lineno
    cfg = RunConfig(**values, base_dir=None if base_dir is None else str(base_dir))
    _validate(cfg, lines)
    return cfg


def _validate(cfg: RunConfig, lines: dict):
    def bad(key, msg):
        raise ConfigError(msg, key=key, line=lines.get(key))

    if cfg.experiment not in EXPERIMENTS:
        bad("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    if cfg.algorithm not in ALGORITHMS:
        bad("algorithm", f"must be one of {', '.join(ALGORITHMS)}")
    if cfg.tau is not None and not _schedule_positive(cfg.tau):
        bad("tau", "step sizes must be positive")
    if cfg.tau_margin < 0:
        bad("tau_margin", "must be nonnegative")
    if cfg.stop is not None and cfg.stop not in STOP_KINDS:
        bad("stop", f"must be one of {', '.join(STOP_KINDS)}")
    if cfg.tol is not None and not cfg.tol > 0:
        bad("tol", "must be positive")
    if cfg.max_iter is not None and cfg.max_iter < 1:
        bad("max_iter", "must be at least 1")
    if cfg.gamma is not None and not cfg.gamma > 0:
        bad("gamma", "must be positive")
    if cfg.gibali_cap is not None and not 0 <= cfg.gibali_cap < 1:
        bad("gibali_cap", "must lie in [0, 1)")
    if cfg.seed < 0:
        bad("seed", "must be nonnegative")
    if cfg.case not in (1, 2, 3):
        bad("case", "must be 1, 2 or 3")
    if cfg.grid_n < 2:
        bad("grid_n", "must be at least 2")
    if cfg.noise_sigma < 0:
        bad("noise_sigma", "must be nonnegative")
    if cfg.l1_radius is not None and not cfg.l1_radius > 0:
        bad("l1_radius", "must be positive")
    if cfg.experiment == "cs" and not (1 <= cfg.K < cfg.n and 1 <= cfg.m < cfg.n):
        bad("K", "need 1 <= K < n and 1 <= m < n")
    if cfg.experiment == "custom":
        for key in ("A", "B", "x0"):
            if getattr(cfg, key) is None:
                bad(key, "required for custom experiments")
        d = len(cfg.x0)
        for key in ("x1", "reference", "min_norm"):
            v = getattr(cfg, key)
            if v is not None and len(v) != d:
                bad(key, f"length {len(v)} differs from x0 ({d})")
        for key in ("A", "B"):
            try:
                parse_operator(getattr(cfg, key), d, cfg.base_dir)
            except (ProxError, ValueError, OSError) as exc:
                bad(key, str(exc))
    elif any(getattr(cfg, k) is not None for k in ("A", "B", "x0", "x1")):
        key = next(k for k in ("A", "B", "x0", "x1") if getattr(cfg, k) is not None)
        bad(key, "only allowed for custom experiments")


def load_config(path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


def parse_operator(spec: str, dim: int, base_dir=None):
    """Build an operator from ``kind[:arg[:arg]]``.

    Kinds: ``zero[:gamma]``, ``scalar_affine:a[:d1,...]``, ``l1_ball:t``,
    ``affine_set:a1,...:b`` and ``least_squares:T.csv:b.csv``.
    """
    kind, *args = spec.split(":")
    vec = lambda s: np.array([float(c) for c in s.split(",")])
    if kind == "zero":
        return ZeroOperator(float(args[0]) if args else 1.0)
    if kind == "scalar_affine":
        shift = vec(args[1]) if len(args) > 1 else None
        if shift is not None and shift.size != dim:
            raise ValueError(f"shift has length {shift.size}, expected {dim}")
        return ScalarAffine(float(args[0]), shift)
    if kind == "l1_ball":
        return NormalConeL1Ball(float(args[0]))
    if kind == "affine_set":
        a = vec(args[0])
        if a.size != dim:
            raise ValueError(f"normal has length {a.size}, expected {dim}")
        return NormalConeAffineSet(a, float(args[1]))
    if kind == "least_squares":
        root = Path(base_dir or ".")
        T = read_matrix_csv(root / args[0])
        b = read_matrix_csv(root / args[1]).ravel()
        if T.shape[1] != dim:
            raise ValueError(f"T has {T.shape[1]} columns, expected {dim}")
        return LeastSquaresGradient(T, b)
    raise ValueError(f"unknown operator kind '{kind}'")


def _build(cfg: RunConfig):
    """Problem, starting points and (for cs) the instance."""
    inst = None
    if cfg.experiment == "example1":
        problem = build_example1(cfg.gamma)
        x0, x1 = EXAMPLE1_X0, EXAMPLE1_X1
    elif cfg.experiment == "example2":
        problem, x0, x1 = build_example2(cfg.grid_n, cfg.case, cfg.gamma)
    elif cfg.experiment == "cs":
        inst, problem = build_cs_instance(cfg.m, cfg.n, cfg.K, cfg.noise_sigma,
                                          cfg.seed, cfg.l1_radius)
        if cfg.gamma is not None:
            problem = Problem(problem.space, problem.A, problem.B, cfg.gamma,
                              name="cs")
        x0 = x1 = np.zeros(cfg.n)
    else:
        d = len(cfg.x0)
        A = parse_operator(cfg.A, d, cfg.base_dir)
        B = parse_operator(cfg.B, d, cfg.base_dir)
        opt = lambda v: None if v is None else np.array(v)
        problem = Problem(euclidean_space(d), A, B, cfg.gamma,
                          reference_solution=opt(cfg.reference),
                          min_norm_solution=opt(cfg.min_norm), name="custom")
        x0 = np.array(cfg.x0)
        x1 = np.array(cfg.x1) if cfg.x1 is not None else x0
    return problem, np.asarray(x0, float), np.asarray(x1, float), inst


def _settings(cfg: RunConfig, problem):
    s = default_settings(cfg.experiment, problem.gamma)
    for key in ("theta", "alpha", "beta", "tau"):
        if getattr(cfg, key) is not None:
            s[key] = getattr(cfg, key)
    if cfg.gibali_cap is not None or cfg.gibali_eps is not None:
        d = s["gibali"]
        s["gibali"] = GibaliRule(d.cap if cfg.gibali_cap is None else cfg.gibali_cap,
                                 d.eps if cfg.gibali_eps is None else cfg.gibali_eps)
    st = s["stop"]
    s["stop"] = StopRule(cfg.stop or st.kind, cfg.tol or st.tol,
                         cfg.max_iter or st.max_iter)
    return s


def _write_columns(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(f"{float(v):.17g}" if not isinstance(v, int) else str(v)
                              for v in r) + "\n")


def _safe_log10(v):
    if v is None or not math.isfinite(v):
        return math.nan
    return math.log10(max(v, 5e-324))


def _emit(record, out: Path, problem, inst):
    record.to_csv(out / "trace.csv", timing=False)
    _write_columns(out / "timing.csv", ["n", "elapsed_ms"],
                   zip(record.n, record.elapsed_ms))
    record.to_json(out / "record.json")
    with open(out / "plot.dat", "w") as fh:
        for k, r in zip(record.n, record.residual):
            fh.write(f"{k} {_safe_log10(r):.17g}\n")
    if record.iterates is not None and problem.space.dimension <= 3:
        d = problem.space.dimension
        header = ["n"] + [f"x{i + 1}" for i in range(d)] \
            + [f"log10_abs_x{d}", "log10_error"]
        target = problem.reference_solution
        rows = []
        for k, x in enumerate(record.iterates):
            err = math.nan if target is None else float(np.linalg.norm(x - target))
            rows.append([k, *x, _safe_log10(abs(x[-1])), _safe_log10(err)])
        _write_columns(out / "iterates.csv", header, rows)
    if inst is not None and record.final_iterate is not None:
        met = recovery_metrics(record.final_iterate, inst, record)
        (out / "metrics.json").write_text(json.dumps(met.to_dict(), indent=2,
                                                     sort_keys=True) + "\n")
        _write_columns(out / "reconstruction.csv", ["index", "xhat", "x_true"],
                       zip(range(inst.x_true.size), record.final_iterate,
                           inst.x_true))
        inst.save(out / "instance")


def execute(cfg: RunConfig, out_dir) -> int:
    """Run one configuration and write its artifacts into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        problem, x0, x1, inst = _build(cfg)
        s = _settings(cfg, problem)
        echo = {"config": cfg.to_mapping(), "seed": cfg.seed,
                "experiment": cfg.experiment}
        keep = problem.space.dimension <= 3
        kw = dict(tau_margin=cfg.tau_margin, echo=echo, keep_iterates=keep)
        try:
            if cfg.algorithm == "alg31":
                rec = run_alg31(problem, s["theta"], s["tau"], x0, x1, s["stop"], **kw)
            elif cfg.algorithm == "alg32":
                rec = run_alg32(problem, s["theta"], s["alpha"], s["beta"],
                                s["tau"], x0, x1, s["stop"], **kw)
            else:
                rec = run_inertial_prox_gibali(problem, s["gibali"], s["tau"],
                                               x0, x1, s["stop"], **kw)
        except NumericalError as exc:
            if exc.record is not None:
                _emit(exc.record, out, problem, None)
            raise
        _emit(rec, out, problem, inst)
    except (ProxError, OSError, ValueError) as exc:
        print(f"prox: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK if rec.converged else EXIT_MAX_ITER


def _out_root(arg):
    return Path(arg or os.environ.get("PROX_OUT") or "prox_out")


def _cmd_run(args) -> int:
    jobs = []
    for path in args.configs:
        try:
            cfg = load_config(path)
        except (ConfigError, OSError) as exc:
            print(f"prox: {path}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        if args.seed is not None:
            cfg.seed = args.seed
        root = _out_root(args.out or cfg.out)
        out = root if len(args.configs) == 1 else root / Path(path).stem
        jobs.append((cfg, out))
    if args.jobs > 1 and len(jobs) > 1:
        with concurrent.futures.ThreadPoolExecutor(args.jobs) as pool:
            codes = list(pool.map(lambda j: execute(*j), jobs))
    else:
        codes = [execute(*j) for j in jobs]
    if EXIT_ERROR in codes:
        return EXIT_ERROR
    return max(codes)


def _cmd_validate(args) -> int:
    status = EXIT_OK
    for path in args.configs:
        try:
            load_config(path)
            print(f"{path}: ok")
        except (ConfigError, OSError) as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            status = EXIT_ERROR
    return status


def _cmd_table1(args) -> int:
    header, rows, _ = table1(args.grid, args.case, args.gamma)
    return _write_table(args, "table1.md", header, rows)


def _cmd_table2(args) -> int:
    header, rows, _ = table2(args.seed)
    return _write_table(args, "table2.md", header, rows)


def _write_table(args, name, header, rows) -> int:
    text = markdown_table(header, rows)
    out = _out_root(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prox", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute one or more run configurations")
    r.add_argument("configs", nargs="+")
    r.add_argument("--out", help="output directory (default $PROX_OUT or ./prox_out)")
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=_cmd_run)

    v = sub.add_parser("validate", help="check configuration files")
    v.add_argument("configs", nargs="+")
    v.set_defaults(func=_cmd_validate)

    t1 = sub.add_parser("table1", help="iteration/CPU table on the L^2 problem")
    t1.add_argument("--out")
    t1.add_argument("--grid", type=int, default=1024)
    t1.add_argument("--case", type=int, default=2, choices=(1, 2, 3))
    t1.add_argument("--gamma", type=float, help="override the cocoercivity constant")
    t1.set_defaults(func=_cmd_table1)

    t2 = sub.add_parser("table2", help="sparse-recovery comparison table")
    t2.add_argument("--out")
    t2.add_argument("--seed", type=int, default=0)
    t2.set_defaults(func=_cmd_table2)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
