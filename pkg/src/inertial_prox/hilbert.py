"""Finite-dimensional Hilbert spaces.

Two flavours are supported: plain Euclidean ``R^d`` and nodal discretisations
of ``L^2([0, 1])`` on a uniform grid, where the inner product is the composite
trapezoid rule.  Vectors are ordinary 1-d numpy arrays; the :class:`Space`
carries the quadrature weights.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import DimensionError, InvalidArgument

__all__ = [
    "Space",
    "euclidean_space",
    "make_grid_space",
    "inner",
    "norm",
    "lincomb",
    "as_vector",
]

EUCLIDEAN = "euclidean"
GRID = "grid_unit_interval"


@dataclass(frozen=True, eq=False)
class Space:
    """Weighted inner-product space ``<u, v> = sum_i w_i u_i v_i``.

    Parameters
    ----------
    weights : ndarray
        Strictly positive quadrature weights, one per coordinate.
    kind : str
        ``"euclidean"`` or ``"grid_unit_interval"``.
    nodes : ndarray, optional
        Grid nodes ``t_i = i/N`` for grid spaces.
    """

    weights: np.ndarray
    kind: str = EUCLIDEAN
    nodes: np.ndarray | None = field(default=None)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidArgument("weights must be a non-empty 1-d array")
        if not np.all(w > 0):
            raise InvalidArgument("weights must be strictly positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.nodes is not None:
            t = np.asarray(self.nodes, dtype=float)
            t.setflags(write=False)
            object.__setattr__(self, "nodes", t)

    @property
    def dimension(self) -> int:
        return self.weights.size

    @property
    def is_euclidean(self) -> bool:
        return self.kind == EUCLIDEAN

    def zeros(self) -> np.ndarray:
        return np.zeros(self.dimension)

    def sample(self, fn) -> np.ndarray:
        """Evaluate ``fn`` at the grid nodes."""
        if self.nodes is None:
            raise InvalidArgument("sampling a function needs a grid space")
        return np.asarray(fn(self.nodes), dtype=float) * np.ones(self.dimension)

    def check(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.dimension,):
            raise DimensionError(
                f"vector of shape {u.shape} does not belong to a space of "
                f"dimension {self.dimension}")
        return u

    def __eq__(self, other):
        if not isinstance(other, Space):
            return NotImplemented
        return (self.kind == other.kind
                and np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash((self.kind, self.weights.tobytes()))

    def __repr__(self):
        return f"Space(kind={self.kind!r}, dimension={self.dimension})"


def euclidean_space(d: int) -> Space:
    if d < 1:
        raise InvalidArgument(f"dimension must be positive, got {d}")
    return Space(np.ones(int(d)), EUCLIDEAN)


def make_grid_space(N: int) -> Space:
    """Uniform grid on [0, 1] with ``N + 1`` nodes and trapezoid weights."""
    if int(N) != N or N < 1:
        raise InvalidArgument(f"grid size N must be a positive integer, got {N}")
    N = int(N)
    h = 1.0 / N
    w = np.full(N + 1, h)
    w[0] = w[-1] = h / 2
    return Space(w, GRID, nodes=np.arange(N + 1) / N)


def as_vector(space: Space, u) -> np.ndarray:
    return space.check(u)


def inner(space: Space, u, v) -> float:
    u = space.check(u)
    v = space.check(v)
    return float(np.dot(space.weights * u, v))


def norm(space: Space, u) -> float:
    u = space.check(u)
    return float(np.sqrt(np.dot(space.weights * u, u)))


def lincomb(space: Space, terms: Iterable[Tuple[float, Sequence[float]]]) -> np.ndarray:
    """Return ``sum_k c_k x_k`` for ``terms = [(c_1, x_1), ...]``."""
    out = space.zeros()
    for c, x in terms:
        out += c * space.check(x)
    return out
