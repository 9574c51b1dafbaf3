"""Discrete optimal transport between two finite mass vectors.

Two independent routes are available: the generic simplex in :mod:`.lp`
applied to the transportation LP, and a transportation (network) simplex
working directly on spanning-tree bases.  Both return dual potentials, and
every result is certified by complementary slackness before it is returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import ConsistencyError, InputError, SolverError
from .lp import Constraint, LinearProgram, solve_lp

BALANCE_TOL = 1e-9
CERTIFICATE_TOL = 1e-8
AGREEMENT_TOL = 1e-8


@dataclass(frozen=True)
class TransportProblem:
    supply: np.ndarray
    demand: np.ndarray
    cost: np.ndarray

    def __post_init__(self):
        a = np.array(self.supply, dtype=float).ravel()
        b = np.array(self.demand, dtype=float).ravel()
        c = np.array(self.cost, dtype=float)
        if c.shape != (a.size, b.size):
            raise InputError(f"cost shape {c.shape} does not match ({a.size}, {b.size})")
        if a.size == 0 or b.size == 0:
            raise InputError("supply and demand must be nonempty")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise InputError("transport data must be finite")
        if np.any(a < 0) or np.any(b < 0):
            raise InputError("supply and demand must be nonnegative")
        if np.any(c < 0):
            raise InputError("costs must be nonnegative")
        if abs(a.sum() - b.sum()) > BALANCE_TOL:
            raise InputError(f"unbalanced transport problem: supply {a.sum()!r} vs demand {b.sum()!r}")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "supply", a)
        object.__setattr__(self, "demand", b)
        object.__setattr__(self, "cost", c)

    @property
    def shape(self) -> tuple[int, int]:
        return self.cost.shape


@dataclass
class TransportResult:
    value: float
    plan: np.ndarray
    row_potential: np.ndarray
    col_potential: np.ndarray
    method: str


def _balanced_demand(tp: TransportProblem) -> np.ndarray:
    total = tp.demand.sum()
    if total == 0:
        return tp.demand.copy()
    return tp.demand * (tp.supply.sum() / total)


def _transport_by_lp(tp: TransportProblem) -> TransportResult:
    m, n = tp.shape
    demand = _balanced_demand(tp)
    cons = []
    for i in range(m):
        row = np.zeros((m, n))
        row[i, :] = 1.0
        cons.append(Constraint(row.ravel(), "=", tp.supply[i]))
    for j in range(n):
        col = np.zeros((m, n))
        col[:, j] = 1.0
        cons.append(Constraint(col.ravel(), "=", demand[j]))
    res = solve_lp(LinearProgram(tuple(-tp.cost.ravel()), tuple(cons)))
    if res.status != "optimal":
        raise SolverError(f"transport LP reported {res.status}", {"status": res.status})
    plan = np.maximum(res.solution.reshape(m, n), 0.0)
    # maximizing -cost: potentials are the negated duals
    pot = -res.duals
    return TransportResult(float(np.sum(plan * tp.cost)), plan, pot[:m], pot[m:], "lp")


def _northwest_corner(a: np.ndarray, b: np.ndarray):
    m, n = a.size, b.size
    a, b = a.copy(), b.copy()
    plan = np.zeros((m, n))
    basis = []
    i = j = 0
    while True:
        q = min(a[i], b[j])
        plan[i, j] = q
        basis.append((i, j))
        a[i] -= q
        b[j] -= q
        if i == m - 1 and j == n - 1:
            break
        if (a[i] <= b[j] and i < m - 1) or j == n - 1:
            i += 1
        else:
            j += 1
    return plan, basis


def _potentials(cost: np.ndarray, basis: list[tuple[int, int]]):
    m, n = cost.shape
    adj: list[list[tuple[int, int]]] = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append((m + j, i * n + j))
        adj[m + j].append((i, i * n + j))
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    u[0] = 0.0
    queue = deque([0])
    while queue:
        node = queue.popleft()
        for other, cell in adj[node]:
            i, j = divmod(cell, n)
            if node < m and np.isnan(v[j]):
                v[j] = cost[i, j] - u[i]
                queue.append(other)
            elif node >= m and np.isnan(u[i]):
                u[i] = cost[i, j] - v[j]
                queue.append(other)
    if np.isnan(u).any() or np.isnan(v).any():
        raise SolverError("transport basis is not a spanning tree", {"basis": basis})
    return u, v


def _tree_path(m: int, n: int, basis: list[tuple[int, int]], start: int, goal: int) -> list[tuple[int, int]]:
    """Basic cells on the tree path from node ``start`` to node ``goal``."""
    adj: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in range(m + n)]
    for i, j in basis:
        adj[i].append((m + j, (i, j)))
        adj[m + j].append((i, (i, j)))
    prev: dict[int, tuple[int, tuple[int, int]]] = {start: (-1, (-1, -1))}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        if node == goal:
            break
        for other, cell in adj[node]:
            if other not in prev:
                prev[other] = (node, cell)
                queue.append(other)
    path = []
    node = goal
    while node != start:
        node, cell = prev[node]
        path.append(cell)
    path.reverse()
    return path


def _transport_by_network_simplex(tp: TransportProblem, max_iter: int | None = None) -> TransportResult:
    m, n = tp.shape
    cost = tp.cost
    plan, basis = _northwest_corner(tp.supply, _balanced_demand(tp))
    tol = 1e-12 * max(1.0, float(cost.max()))
    if max_iter is None:
        max_iter = 10 * (m * n + m + n) ** 2
    for _ in range(max_iter):
        u, v = _potentials(cost, basis)
        reduced = cost - u[:, None] - v[None, :]
        for i, j in basis:
            reduced[i, j] = 0.0
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return TransportResult(float(np.sum(plan * cost)), plan, u, v, "network")
        # Bland: lowest-index improving cell enters, lowest-index blocking cell leaves
        i0, j0 = divmod(int(entering[0]), n)
        path = _tree_path(m, n, basis, i0, m + j0)
        minus = path[0::2]
        plus = path[1::2]
        theta = min(plan[c] for c in minus)
        leaving = min(c for c in minus if plan[c] == theta)
        for c in minus:
            plan[c] -= theta
        for c in plus:
            plan[c] += theta
        plan[i0, j0] += theta
        plan[leaving] = 0.0
        basis.remove(leaving)
        basis.append((i0, j0))
    raise SolverError(f"network simplex exceeded {max_iter} iterations", {"basis": basis})


def certify(tp: TransportProblem, res: TransportResult, tol: float = CERTIFICATE_TOL) -> dict:
    """Complementary-slackness certificate of optimality for ``res``.

    Returns the measured residuals; raises :class:`SolverError` when any of
    them exceeds ``tol`` (marginals use the tighter ``BALANCE_TOL``).
    """
    plan, u, v = res.plan, res.row_potential, res.col_potential
    reduced = tp.cost - u[:, None] - v[None, :]
    out = {
        "negative_plan": float(max(0.0, -plan.min())),
        "row_marginal": float(np.max(np.abs(plan.sum(axis=1) - tp.supply))),
        "col_marginal": float(np.max(np.abs(plan.sum(axis=0) - tp.demand))),
        "dual_infeasibility": float(max(0.0, -reduced.min())),
        "slackness": float(np.max(np.abs(reduced[plan > 1e-12]), initial=0.0)),
        "duality_gap": float(abs(res.value - (u @ tp.supply + v @ tp.demand))),
    }
    marg_ok = max(out["negative_plan"], out["row_marginal"], out["col_marginal"]) <= BALANCE_TOL
    cert_ok = max(out["dual_infeasibility"], out["slackness"], out["duality_gap"]) <= tol
    if not (marg_ok and cert_ok):
        raise SolverError(f"transport plan from {res.method!r} failed certification", out)
    return out


def solve_transport(tp: TransportProblem, method: str = "lp") -> TransportResult:
    """Minimum-cost plan for ``tp``.

    ``method`` is ``"lp"`` (generic simplex), ``"network"`` (transportation
    simplex) or ``"crosscheck"`` (both; their values must agree within
    ``AGREEMENT_TOL`` and the LP result is returned).
    """
    if method == "lp":
        res = _transport_by_lp(tp)
    elif method == "network":
        res = _transport_by_network_simplex(tp)
    elif method == "crosscheck":
        res = _transport_by_lp(tp)
        other = _transport_by_network_simplex(tp)
        certify(tp, other)
        if abs(res.value - other.value) > AGREEMENT_TOL:
            raise ConsistencyError(f"transport routes disagree: lp {res.value!r} vs network {other.value!r}")
    else:
        raise InputError(f"unknown transport method {method!r}")
    certify(tp, res)
    return res
