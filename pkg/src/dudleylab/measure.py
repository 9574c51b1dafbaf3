"""Finitely supported signed and probability measures, and couplings."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from .errors import InputError
from .metric_space import FiniteMetricSpace, PointMap

if TYPE_CHECKING:
    from .lipschitz import TabulatedFunction

#: Largest drift of a probability mass total that is silently renormalized.
RENORMALIZE_TOLERANCE = 1e-9
#: Tolerance on coupling marginals.
MARGINAL_TOLERANCE = 1e-9
# Solver round-off below this is clipped to zero in coupling plans.
_NEGATIVE_SLACK = 1e-12


def _mass_vector(space: FiniteMetricSpace, mass) -> np.ndarray:
    try:
        m = np.array(mass, dtype=float).ravel()
    except (TypeError, ValueError) as exc:
        raise InputError(f"mass vector is not numeric: {exc}") from None
    if m.size != space.size:
        raise InputError(f"mass vector has {m.size} entries for a {space.size}-point space")
    if not np.all(np.isfinite(m)):
        raise InputError("mass vector has non-finite entries")
    return m


class SignedMeasure:
    """A real mass on each point of a finite space."""

    __slots__ = ("space", "mass")

    def __init__(self, space: FiniteMetricSpace, mass):
        m = _mass_vector(space, mass)
        m.setflags(write=False)
        self.space = space
        self.mass = m

    def _check_same_space(self, other: "SignedMeasure"):
        if self.space != other.space:
            raise InputError("measures live on different spaces")

    def __add__(self, other):
        if not isinstance(other, SignedMeasure):
            return NotImplemented
        self._check_same_space(other)
        return SignedMeasure(self.space, self.mass + other.mass)

    def __sub__(self, other):
        if not isinstance(other, SignedMeasure):
            return NotImplemented
        self._check_same_space(other)
        return SignedMeasure(self.space, self.mass - other.mass)

    def __neg__(self):
        return SignedMeasure(self.space, -self.mass)

    def __mul__(self, scalar):
        if not np.isscalar(scalar):
            return NotImplemented
        return SignedMeasure(self.space, float(scalar) * self.mass)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SignedMeasure):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.mass, other.mass)

    __hash__ = None

    def __repr__(self):
        return f"{type(self).__name__}(n={self.space.size}, mass={self.mass.tolist()})"

    def total_mass(self) -> float:
        return float(np.sum(self.mass))


class ProbabilityMeasure(SignedMeasure):
    """Nonnegative masses summing to one (renormalized on construction)."""

    __slots__ = ()

    def __init__(self, space: FiniteMetricSpace, mass):
        m = _mass_vector(space, mass)
        if np.any(m < 0):
            raise InputError(f"probability masses must be nonnegative, got min {m.min()!r}")
        total = float(np.sum(m))
        if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
            raise InputError(f"probability masses sum to {total!r}, not 1")
        if total != 1.0:
            m = m / total
        super().__init__(space, m)

    @classmethod
    def from_signed(cls, mu: SignedMeasure) -> "ProbabilityMeasure":
        return cls(mu.space, mu.mass)


def point_mass(space: FiniteMetricSpace, p: int) -> ProbabilityMeasure:
    """Unit mass at point index ``p``."""
    if not (isinstance(p, (int, np.integer)) and 0 <= p < space.size):
        raise InputError(f"point index {p!r} out of range for a {space.size}-point space")
    m = np.zeros(space.size)
    m[p] = 1.0
    return ProbabilityMeasure(space, m)


def uniform(space: FiniteMetricSpace) -> ProbabilityMeasure:
    return ProbabilityMeasure(space, np.full(space.size, 1.0 / space.size))


def integrate(mu: SignedMeasure, f: "TabulatedFunction") -> float:
    """``<mu, f> = sum_i mass[i] * f[i]``."""
    if mu.space != f.space:
        raise InputError("function and measure live on different spaces")
    return float(np.dot(mu.mass, f.values))


def pushforward(phi: PointMap, mu: SignedMeasure) -> SignedMeasure:
    """Image measure of ``mu`` under ``phi``; probabilities stay probabilities."""
    if mu.space != phi.source:
        raise InputError("measure does not live on the map's source")
    out = np.zeros(phi.target.size)
    np.add.at(out, np.array(phi.image, dtype=int), mu.mass)
    if isinstance(mu, ProbabilityMeasure):
        return ProbabilityMeasure(phi.target, out)
    return SignedMeasure(phi.target, out)


def total_variation_norm(mu: SignedMeasure) -> float:
    return float(np.sum(np.abs(mu.mass)))


class Coupling:
    """A joint mass matrix whose marginals are two given probability measures."""

    __slots__ = ("row", "col", "plan")

    def __init__(self, row: ProbabilityMeasure, col: ProbabilityMeasure, plan, tol: float = MARGINAL_TOLERANCE):
        p = np.array(plan, dtype=float)
        if p.shape != (row.space.size, col.space.size):
            raise InputError(f"plan shape {p.shape} does not match marginals ({row.space.size}, {col.space.size})")
        if not np.all(np.isfinite(p)):
            raise InputError("plan has non-finite entries")
        if np.any(p < -_NEGATIVE_SLACK):
            raise InputError(f"plan has negative entries (min {p.min()!r})")
        p = np.where(p < 0, 0.0, p)
        row_err = np.max(np.abs(p.sum(axis=1) - row.mass))
        col_err = np.max(np.abs(p.sum(axis=0) - col.mass))
        if row_err > tol or col_err > tol:
            raise InputError(f"plan marginals off by {max(row_err, col_err):.3g} (tolerance {tol:g})")
        p.setflags(write=False)
        self.row = row
        self.col = col
        self.plan = p

    @property
    def row_space(self) -> FiniteMetricSpace:
        return self.row.space

    @property
    def col_space(self) -> FiniteMetricSpace:
        return self.col.space

    def expected(self, cost) -> float:
        """``E_pi[cost]`` for a cost matrix on ``row_space x col_space``."""
        return float(np.sum(self.plan * np.asarray(cost, dtype=float)))

    def mass_where(self, mask) -> float:
        return float(np.sum(self.plan[np.asarray(mask, dtype=bool)]))

    def __repr__(self):
        return f"Coupling(plan={self.plan.tolist()})"


def product_coupling(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> Coupling:
    return Coupling(mu, nu, np.outer(mu.mass, nu.mass))
