"""Distances between measures on a finite metric space.

* ``bl_norm`` / ``bl_distance``: the bounded-Lipschitz dual norm, computed as
  a linear program over ``{f : |f| <= 1, |f(x) - f(y)| <= d(x, y)}`` and, for
  probability measures, cross-checked against optimal transport with cost
  ``min(d, 2)``.
* ``levy_prokhorov``: the Lévy–Prokhorov metric through max-flow (Strassen)
  couplings, with an exhaustive subset oracle in ``prokhorov_bruteforce``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConsistencyError, InputError
from .lipschitz import TabulatedFunction
from .measure import Coupling, ProbabilityMeasure, SignedMeasure, total_variation_norm
from .metric_space import FiniteMetricSpace
from .solvers import Constraint, LinearProgram, TransportProblem, max_coupling, solve_lp, solve_transport
from .solvers.maxflow import FLOW_FLOOR

#: Truncation level of the transport cost dual to the BL norm.
BL_TRUNCATION = 2.0
#: Largest primal/dual discrepancy tolerated before declaring a solver bug.
DUALITY_GAP_LIMIT = 1e-6
BRUTEFORCE_MAX_POINTS = 16


@dataclass(frozen=True)
class BLNorm:
    value: float
    witness: TabulatedFunction


@dataclass(frozen=True)
class BLDistance:
    value: float
    coupling: Coupling
    witness: TabulatedFunction
    transport_value: float

    @property
    def duality_gap(self) -> float:
        return abs(self.value - self.transport_value)


@dataclass(frozen=True)
class ProkhorovDistance:
    value: float
    coupling: Coupling
    threshold: float


def _same_space(mu: SignedMeasure, nu: SignedMeasure) -> FiniteMetricSpace:
    if mu.space != nu.space:
        raise InputError("measures live on different spaces")
    return mu.space


def bl_program(mu: SignedMeasure) -> LinearProgram:
    """The LP ``max <mu, f>`` over ``BLip(d)``.

    Lipschitz rows for pairs at distance >= 2 are implied by ``|f| <= 1`` and
    are left out.
    """
    d = mu.space.dist
    n = mu.space.size
    cons = []
    for i, j in itertools.permutations(range(n), 2):
        if d[i, j] < BL_TRUNCATION:
            row = np.zeros(n)
            row[i], row[j] = 1.0, -1.0
            cons.append(Constraint(row, "<=", d[i, j]))
    return LinearProgram(tuple(mu.mass), tuple(cons), ((-1.0, 1.0),) * n)


def _swapped(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> bool:
    """Canonical argument order, so that distances are exactly symmetric in floats."""
    return tuple(mu.mass) > tuple(nu.mass)


def bl_norm(mu: SignedMeasure) -> BLNorm:
    """``sup <mu, f>`` over ``f`` bounded by 1 and 1-Lipschitz, with a maximizing ``f``."""
    res = solve_lp(bl_program(mu))
    if res.status != "optimal":  # pragma: no cover - the program is always feasible and bounded
        raise ConsistencyError(f"BL program reported {res.status}")
    witness = TabulatedFunction(mu.space, np.clip(res.solution, -1.0, 1.0))
    return BLNorm(res.value, witness)


def truncated_cost(space: FiniteMetricSpace, level: float = BL_TRUNCATION) -> np.ndarray:
    return np.minimum(space.dist, level)


def bl_distance(mu: ProbabilityMeasure, nu: ProbabilityMeasure, transport_method: str = "network") -> BLDistance:
    """``||mu - nu||`` by the primal LP, certified by a ``min(d, 2)`` transport plan.

    The transport side defaults to the transportation simplex so the two
    routes share no solver code.
    """
    space = _same_space(mu, nu)
    if _swapped(mu, nu):
        res = bl_distance(nu, mu, transport_method)
        return BLDistance(res.value, Coupling(mu, nu, res.coupling.plan.T), res.witness * -1.0, res.transport_value)
    primal = bl_norm(mu - nu)
    tp = TransportProblem(mu.mass, nu.mass, truncated_cost(space))
    dual = solve_transport(tp, method=transport_method)
    if abs(primal.value - dual.value) > DUALITY_GAP_LIMIT:
        raise ConsistencyError(
            f"BL primal {primal.value!r} and transport dual {dual.value!r} disagree by "
            f"{abs(primal.value - dual.value):.3g}"
        )
    return BLDistance(primal.value, Coupling(mu, nu, dual.plan), primal.witness, dual.value)


def optimal_bl_coupling(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> Coupling:
    """Coupling minimizing ``E[min(d, 2)]``; its cost is the BL distance."""
    return bl_distance(mu, nu).coupling


def tv_distance(mu: SignedMeasure, nu: SignedMeasure) -> float:
    _same_space(mu, nu)
    return total_variation_norm(mu - nu)


def _complete(mu: ProbabilityMeasure, nu: ProbabilityMeasure, partial: np.ndarray) -> Coupling:
    """Extend a partial plan to a coupling by the product of the leftover marginals."""
    r = np.maximum(mu.mass - partial.sum(axis=1), 0.0)
    s = np.maximum(nu.mass - partial.sum(axis=0), 0.0)
    plan = partial.copy()
    if r.sum() > 0 and s.sum() > 0:
        plan += np.outer(r, s) / r.sum()
    return Coupling(mu, nu, plan)


def strassen_coupling(mu: ProbabilityMeasure, nu: ProbabilityMeasure, eps: float):
    """Coupling minimizing ``pi(d > eps)``; returns ``(coupling, overflow)``."""
    space = _same_space(mu, nu)
    if not eps >= 0:
        raise InputError(f"eps must be nonnegative, got {eps!r}")
    flow = max_coupling(mu.mass, nu.mass, space.dist <= eps)
    overflow = max(0.0, 1.0 - flow.value)
    return _complete(mu, nu, flow.flow), overflow


def distance_levels(space: FiniteMetricSpace) -> np.ndarray:
    """Sorted distinct distance values, starting at 0."""
    return np.unique(space.dist)


def levy_prokhorov(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> ProkhorovDistance:
    """Lévy–Prokhorov distance with closed fattening.

    ``m(eps)``, the largest mass a coupling can put on ``{d <= eps}``, is a
    right-continuous step function jumping only at distance values, so
    ``min_eps max(eps, 1 - m(eps))`` is attained at a distance value or at a
    crossing point ``1 - m`` of one of the steps.
    """
    space = _same_space(mu, nu)
    if _swapped(mu, nu):
        res = levy_prokhorov(nu, mu)
        return ProkhorovDistance(res.value, Coupling(mu, nu, res.coupling.plan.T), res.threshold)
    levels = distance_levels(space)
    deficits = np.array([1.0 - max_coupling(mu.mass, nu.mass, space.dist <= t).value for t in levels])
    # the flow stops augmenting below FLOW_FLOOR, so smaller deficits are round-off
    deficits[deficits <= FLOW_FLOOR] = 0.0
    candidates = np.unique(np.concatenate([levels, deficits[deficits <= 1.0]]))
    best = np.inf
    for eps in candidates:
        # m(eps) is the value at the largest level <= eps
        k = np.searchsorted(levels, eps, side="right") - 1
        best = min(best, max(eps, deficits[k]))
    value = float(min(best, 1.0))
    # at eps = value the Strassen condition pi(d > eps) <= eps holds
    coupling, _ = strassen_coupling(mu, nu, value)
    return ProkhorovDistance(value, coupling, value)


def _subset_deficit(mu: np.ndarray, nu: np.ndarray, dist: np.ndarray, eps: float, subsets: np.ndarray) -> float:
    """``max_A max(mu(A) - nu(A^eps), nu(A) - mu(A^eps))`` over all subsets ``A``."""
    near = (dist <= eps).astype(float)
    fat = (subsets @ near) > 0
    forward = subsets @ mu - fat @ nu
    backward = subsets @ nu - fat @ mu
    return float(max(forward.max(), backward.max(), 0.0))


def prokhorov_bruteforce(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> float:
    """``inf {eps : mu(A) <= nu(A^eps) + eps and nu(A) <= mu(A^eps) + eps for all A}``.

    Enumerates all ``2^n`` subsets; an oracle independent of the flow route.
    """
    space = _same_space(mu, nu)
    n = space.size
    if n > BRUTEFORCE_MAX_POINTS:
        raise CapacityError(f"subset enumeration limited to {BRUTEFORCE_MAX_POINTS} points, got {n}")
    subsets = ((np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
    levels = distance_levels(space)
    deficit_at = {float(t): _subset_deficit(mu.mass, nu.mass, space.dist, t, subsets) for t in levels}
    grid = sorted(set(deficit_at) | {v for v in deficit_at.values() if v <= 1.0} | {1.0})
    for eps in grid:
        d = deficit_at.get(eps)
        if d is None:
            d = _subset_deficit(mu.mass, nu.mass, space.dist, eps, subsets)
        if d <= eps + 1e-15:
            return float(eps)
    return 1.0  # pragma: no cover - eps = 1 always qualifies
