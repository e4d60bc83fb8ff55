"""Maximal monotone operators with closed-form resolvents.

Every operator exposes ``resolvent(r, x) = (I + r*A)^{-1} x``.  Single-valued
operators additionally expose ``forward(x)`` and, when known, a cocoercivity
constant ``gamma`` such that ``<Bx - By, x - y> >= gamma * ||Bx - By||^2``.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, InvalidArgument, NotSingleValued

__all__ = [
    "Operator",
    "ScalarAffine",
    "NormalConeL1Ball",
    "NormalConeAffineSet",
    "LeastSquaresGradient",
    "ZeroOperator",
    "project_l1_ball",
    "project_affine",
    "spectral_norm_gram",
    "read_matrix_csv",
    "write_matrix_csv",
    "GRAM_SAFETY",
]

# inflation applied to the estimated ||T^T T|| before forming gamma
GRAM_SAFETY = 1.01


def _check_r(r):
    if not r > 0:
        raise InvalidArgument(f"resolvent parameter must be positive, got {r}")


class Operator:
    """Base class.  Subclasses set ``kind`` and ``single_valued``."""

    kind = "abstract"
    single_valued = False
    gamma = None

    def resolvent(self, r, x):
        raise NotImplementedError

    def forward(self, x):
        raise NotSingleValued(f"operator of kind '{self.kind}' is set-valued")

    def params(self) -> dict:
        return {}

    def describe(self) -> dict:
        d = {"kind": self.kind, "gamma": self.gamma}
        d.update(self.params())
        return d

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class ScalarAffine(Operator):
    """``x -> a*x + d`` with ``a >= 0``.

    The cocoercivity constant is ``1/a`` (``a > 0``); for ``a == 0`` the map is
    constant and cocoercive for every positive constant, so ``gamma`` must be
    supplied.
    """

    kind = "scalar_affine"
    single_valued = True

    def __init__(self, a, shift=None, gamma=None):
        if not a >= 0:
            raise InvalidArgument(f"scalar_affine needs a >= 0, got {a}")
        self.a = float(a)
        self.shift = None if shift is None else np.asarray(shift, dtype=float)
        if gamma is None:
            gamma = 1.0 / self.a if self.a > 0 else None
        self.gamma = gamma

    def _d(self, x):
        return 0.0 if self.shift is None else self.shift

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        return self.a * x + self._d(x)

    def resolvent(self, r, x):
        _check_r(r)
        x = np.asarray(x, dtype=float)
        return (x - r * self._d(x)) / (1.0 + r * self.a)

    def params(self):
        return {"a": self.a,
                "shift": None if self.shift is None else self.shift.tolist()}


class ZeroOperator(Operator):
    kind = "zero"
    single_valued = True

    def __init__(self, gamma=1.0):
        if not gamma > 0:
            raise InvalidArgument("declared gamma must be positive")
        self.gamma = float(gamma)

    def forward(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def resolvent(self, r, x):
        _check_r(r)
        return np.array(x, dtype=float)


class NormalConeL1Ball(Operator):
    """Normal cone of ``{x : ||x||_1 <= t}``; the resolvent is the projection."""

    kind = "normal_cone_l1_ball"

    def __init__(self, radius):
        if not radius > 0:
            raise InvalidArgument(f"l1 radius must be positive, got {radius}")
        self.radius = float(radius)

    def resolvent(self, r, x):
        _check_r(r)
        return project_l1_ball(x, self.radius)

    def params(self):
        return {"radius": self.radius}


class NormalConeAffineSet(Operator):
    """Normal cone of the hyperplane ``{x : <a, x> = b}``."""

    kind = "normal_cone_affine_set"

    def __init__(self, a, b):
        a = np.asarray(a, dtype=float)
        if not np.any(a):
            raise InvalidArgument("hyperplane normal must be nonzero")
        self.a = a
        self.b = float(b)

    def resolvent(self, r, x):
        _check_r(r)
        return project_affine(x, self.a, self.b)

    def params(self):
        return {"a": self.a.tolist(), "b": self.b}


class LeastSquaresGradient(Operator):
    """Gradient ``x -> T^T (T x - b)`` of ``0.5 * ||T x - b||^2``.

    ``gamma`` is ``1 / (safety * lambda_max(T^T T))`` where the largest
    eigenvalue comes from :func:`spectral_norm_gram` unless ``gram_norm`` is
    given.
    """

    kind = "least_squares_gradient"
    single_valued = True

    def __init__(self, T, b, gram_norm=None, safety=GRAM_SAFETY):
        T = np.asarray(T, dtype=float)
        b = np.asarray(b, dtype=float)
        if T.ndim != 2 or b.shape != (T.shape[0],):
            raise InvalidArgument(
                f"incompatible shapes T{T.shape} and b{b.shape}")
        self.T = T
        self.b = b
        if gram_norm is None:
            gram_norm = spectral_norm_gram(T)
        self.gram_norm = float(gram_norm)
        self.safety = float(safety)
        self.gamma = 1.0 / (self.safety * self.gram_norm)

    def forward(self, x):
        return self.T.T @ (self.T @ np.asarray(x, dtype=float) - self.b)

    def resolvent(self, r, x):
        # (I + r T^T T) y = x + r T^T b
        _check_r(r)
        n = self.T.shape[1]
        rhs = np.asarray(x, dtype=float) + r * (self.T.T @ self.b)
        return np.linalg.solve(np.eye(n) + r * (self.T.T @ self.T), rhs)

    def params(self):
        return {"shape": list(self.T.shape), "gram_norm": self.gram_norm,
                "safety": self.safety}


def project_l1_ball(x, t):
    """Euclidean projection of ``x`` onto ``{y : ||y||_1 <= t}``.

    Sort-based soft thresholding; points already inside the ball are returned
    unchanged.
    """
    if not t > 0:
        raise InvalidArgument(f"l1 radius must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    if ax.sum() <= t:
        return x.copy()
    u = np.sort(ax)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, u.size + 1)
    rho = np.nonzero(u * k > css - t)[0][-1]
    lam = (css[rho] - t) / (rho + 1.0)
    return np.sign(x) * np.maximum(ax - lam, 0.0)


def project_affine(x, a, b):
    """Projection onto the hyperplane ``{y : <a, y> = b}``."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    aa = float(a @ a)
    if aa == 0.0:
        raise InvalidArgument("hyperplane normal must be nonzero")
    return x - ((a @ x - b) / aa) * a


def spectral_norm_gram(T, tol=1e-8, max_iter=10_000, seed=0):
    """Largest eigenvalue of ``T^T T`` by power iteration.

    Stops once ``||G v - mu v|| <= tol * mu`` for the Rayleigh quotient ``mu``.

    Raises
    ------
    ConvergenceError
        If ``max_iter`` iterations do not reach ``tol``; the last estimate is
        attached.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.size == 0:
        raise InvalidArgument("T must be a non-empty matrix")
    if not np.any(T):
        raise InvalidArgument("T must be nonzero")
    if not tol > 0:
        raise InvalidArgument("tol must be positive")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(T.shape[1])
    v /= np.linalg.norm(v)
    mu = 0.0
    for k in range(1, max_iter + 1):
        gv = T.T @ (T @ v)
        mu = float(v @ gv)
        if mu <= 0.0:
            # start vector in the null space; restart elsewhere
            v = rng.standard_normal(T.shape[1])
            v /= np.linalg.norm(v)
            continue
        if np.linalg.norm(gv - mu * v) <= tol * mu:
            return mu
        v = gv / np.linalg.norm(gv)
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations",
        estimate=mu, iterations=max_iter)


def write_matrix_csv(path, M):
    """Write a matrix (or a vector, as one column) with 17 significant digits."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for row in M:
            w.writerow(f"{v:.17g}" for v in row)


def read_matrix_csv(path) -> np.ndarray:
    with open(Path(path), newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    if not rows:
        raise InvalidArgument(f"{path}: empty matrix file")
    if len({len(r) for r in rows}) != 1:
        raise InvalidArgument(f"{path}: ragged rows")
    M = np.array(rows)
    if not np.all(np.isfinite(M)):
        raise InvalidArgument(f"{path}: non-finite entries")
    return M
