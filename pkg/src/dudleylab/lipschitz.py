"""Tabulated functions, bounded-Lipschitz scale, and uniform regularization.

``regularize`` approximates an arbitrary function on a finite space from
below by a member of ``n * BLip(d)``: with a modulus-of-continuity radius
``theta`` and an integer ``n >= max(|f| + eps, 2|f| / theta)`` the sup-convolution

    g(y) = max_x f(x) - eps - n d(x, y)

satisfies ``f - eps <= g <= f`` and ``max(|g|, Lip(g)) <= n``.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import InputError
from .metric_space import FiniteMetricSpace


class TabulatedFunction:
    """A real function given by its value at each point of a finite space."""

    __slots__ = ("space", "values")

    def __init__(self, space: FiniteMetricSpace, values):
        try:
            v = np.array(values, dtype=float).ravel()
        except (TypeError, ValueError) as exc:
            raise InputError(f"function values are not numeric: {exc}") from None
        if v.size != space.size:
            raise InputError(f"{v.size} values for a {space.size}-point space")
        if not np.all(np.isfinite(v)):
            raise InputError("function values must be finite")
        v.setflags(write=False)
        self.space = space
        self.values = v

    @classmethod
    def constant(cls, space: FiniteMetricSpace, c: float) -> "TabulatedFunction":
        return cls(space, np.full(space.size, float(c)))

    @classmethod
    def from_callable(cls, space: FiniteMetricSpace, fn) -> "TabulatedFunction":
        """Tabulate ``fn`` on the labels of ``space``."""
        return cls(space, [fn(label) for label in space.labels])

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __getitem__(self, i):
        return float(self.values[i])

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return TabulatedFunction(self.space, float(scalar) * self.values)

    __rmul__ = __mul__

    def __sub__(self, other):
        if isinstance(other, TabulatedFunction):
            if other.space != self.space:
                raise InputError("functions live on different spaces")
            return TabulatedFunction(self.space, self.values - other.values)
        if np.isscalar(other):
            return TabulatedFunction(self.space, self.values - float(other))
        return NotImplemented

    def __repr__(self):
        return f"TabulatedFunction({self.values.tolist()})"


def lipschitz_constant(f: TabulatedFunction) -> float:
    """``max_{i != j} |f[i] - f[j]| / d(i, j)``; 0 on a singleton."""
    n = f.space.size
    if n < 2:
        return 0.0
    off = ~np.eye(n, dtype=bool)
    diffs = np.abs(f.values[:, None] - f.values[None, :])
    return float(np.max(diffs[off] / f.space.dist[off]))


def blip_scale(f: TabulatedFunction) -> float:
    """Smallest ``n`` with ``f`` in ``n * BLip(d)``."""
    return max(f.sup_norm, lipschitz_constant(f))


def continuity_radius(f: TabulatedFunction, eps: float) -> float:
    """Largest ``theta`` such that ``d(x, y) < theta`` forces ``|f(x) - f(y)| < eps``.

    This is the smallest distance realized by a pair whose values differ by
    at least ``eps``; when no pair does, ``diameter + 1``.
    """
    d = f.space.dist
    n = f.space.size
    off = ~np.eye(n, dtype=bool)
    bad = off & (np.abs(f.values[:, None] - f.values[None, :]) >= eps)
    if not bad.any():
        return f.space.diameter + 1.0
    return float(d[bad].min())


class Regularization(NamedTuple):
    g: TabulatedFunction
    n: int
    theta: float


def regularize(f: TabulatedFunction, eps: float) -> Regularization:
    """Sup-convolution of ``f`` into ``n * BLip(d)`` lying within ``eps`` below ``f``."""
    if not eps > 0:
        raise InputError(f"epsilon must be positive, got {eps!r}")
    norm = f.sup_norm
    if norm == 0.0:
        theta = math.inf
        n = max(1, math.ceil(eps))
    else:
        theta = continuity_radius(f, eps)
        n = max(1, math.ceil(max(norm + eps, 2.0 * norm / theta)))
    # candidates[x, y] = f(x) - eps - n d(x, y); max over x.
    candidates = f.values[:, None] - eps - n * f.space.dist
    g = TabulatedFunction(f.space, candidates.max(axis=0))
    return Regularization(g, n, theta)


def regularization_argmax(f: TabulatedFunction, eps: float, n: int) -> np.ndarray:
    """Index attaining the max for each ``y`` (lowest index on ties)."""
    candidates = f.values[:, None] - eps - n * f.space.dist
    return np.argmax(candidates, axis=0)


def separating_sequence_function(t):
    """Bounded continuous ``f`` with ``f(j) - f(j + 1/j) = 1`` for every integer ``j >= 1``.

    Built from tent bumps ``max(0, 1 - 2j |t - j|)`` of half-width ``1/(2j)``
    centred at the integers ``j != 2``, minus a tent of half-width 1/4 centred
    at 2.5.  Because ``1 + 1/1 = 2`` is both the partner of 1 and the
    integer 2, no bump sits at 2: ``f(1) = 1, f(2) = 0, f(2.5) = -1`` and
    ``f(j) = 1, f(j + 1/j) = 0`` for ``j >= 3``.  The bumps are disjoint, so
    values lie in [-1, 1].  Not uniformly continuous.
    """
    t_arr = np.asarray(t, dtype=float)
    j = np.rint(t_arr)
    bump = np.where((j >= 1) & (j != 2), np.maximum(0.0, 1.0 - 2.0 * j * np.abs(t_arr - j)), 0.0)
    dip = np.maximum(0.0, 1.0 - 4.0 * np.abs(t_arr - 2.5))
    val = bump - dip
    if np.ndim(val) == 0:
        return float(val)
    return val
