"""Dense two-phase simplex with Bland's pivoting rule.

Sized for the small programs the metrics module builds (at most a few
hundred rows).  Every pivot choice is deterministic, so identical inputs give
identical bases, solutions and duals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import InputError, SolverError

_RELATIONS = ("<=", "=", ">=")

REDUCED_COST_TOL = 1e-10
PIVOT_TOL = 1e-11
PHASE1_TOL = 1e-9
FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    relation: str
    bound: float

    def __post_init__(self):
        if self.relation not in _RELATIONS:
            raise InputError(f"relation must be one of {_RELATIONS}, got {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        object.__setattr__(self, "bound", float(self.bound))


@dataclass(frozen=True)
class LinearProgram:
    """``maximize objective . x`` subject to ``constraints`` and per-variable bounds.

    ``bounds[k] = (lo, hi)`` where either side may be ``None`` or infinite;
    the default bound of every variable is ``(0, inf)``.
    """

    objective: tuple
    constraints: tuple = ()
    bounds: tuple | None = None

    def __post_init__(self):
        c = tuple(float(v) for v in self.objective)
        n = len(c)
        cons = tuple(self.constraints)
        bounds = tuple(self.bounds) if self.bounds is not None else ((0.0, math.inf),) * n
        if len(bounds) != n:
            raise InputError(f"{len(bounds)} bounds for {n} variables")
        norm_bounds = []
        for lo, hi in bounds:
            lo = -math.inf if lo is None else float(lo)
            hi = math.inf if hi is None else float(hi)
            if lo > hi:
                raise InputError(f"empty variable bound [{lo}, {hi}]")
            norm_bounds.append((lo, hi))
        for con in cons:
            if len(con.coeffs) != n:
                raise InputError(f"constraint has {len(con.coeffs)} coefficients for {n} variables")
        values = list(c) + [a for con in cons for a in con.coeffs] + [con.bound for con in cons]
        if not all(math.isfinite(v) for v in values):
            raise InputError("linear program has non-finite coefficients")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "bounds", tuple(norm_bounds))

    @property
    def n_vars(self) -> int:
        return len(self.objective)

    @classmethod
    def from_arrays(cls, c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None) -> "LinearProgram":
        cons = []
        if A_ub is not None:
            cons += [Constraint(row, "<=", b) for row, b in zip(np.asarray(A_ub, float), np.asarray(b_ub, float))]
        if A_eq is not None:
            cons += [Constraint(row, "=", b) for row, b in zip(np.asarray(A_eq, float), np.asarray(b_eq, float))]
        return cls(tuple(c), tuple(cons), None if bounds is None else tuple(bounds))


@dataclass
class LPResult:
    status: str
    value: float = math.nan
    solution: np.ndarray | None = None
    duals: np.ndarray | None = None
    iterations: int = 0
    basis: tuple = field(default=(), repr=False)


class _StandardForm:
    """``x = offset + T @ z`` with ``z >= 0``; rows ``A z (rel) b`` with ``b >= 0``."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        columns: list[tuple[int, float]] = []  # (original var, sign)
        offset = np.zeros(n)
        extra_rows: list[tuple[int, float]] = []  # (std column, upper bound)
        for k, (lo, hi) in enumerate(lp.bounds):
            if math.isfinite(lo):
                offset[k] = lo
                columns.append((k, 1.0))
                if math.isfinite(hi):
                    extra_rows.append((len(columns) - 1, hi - lo))
            elif math.isfinite(hi):
                offset[k] = hi
                columns.append((k, -1.0))
            else:
                columns.append((k, 1.0))
                columns.append((k, -1.0))
        T = np.zeros((n, len(columns)))
        for col, (k, s) in enumerate(columns):
            T[k, col] = s
        self.offset = offset
        self.T = T

        m_orig = len(lp.constraints)
        A_orig = np.array([con.coeffs for con in lp.constraints], dtype=float).reshape(m_orig, n)
        b_orig = np.array([con.bound for con in lp.constraints], dtype=float)
        rel = [con.relation for con in lp.constraints]
        A = A_orig @ T
        b = b_orig - A_orig @ offset
        for col, ub in extra_rows:
            row = np.zeros(len(columns))
            row[col] = 1.0
            A = np.vstack([A, row])
            b = np.append(b, ub)
            rel.append("<=")
        sign = np.where(b < 0, -1.0, 1.0)
        A = A * sign[:, None]
        b = b * sign
        flip = {"<=": ">=", ">=": "<=", "=": "="}
        self.relations = [flip[r] if s < 0 else r for r, s in zip(rel, sign)]
        self.A = A
        self.b = b
        self.sign = sign
        self.c = T.T @ np.array(lp.objective)
        self.n_orig_rows = m_orig


def solve_lp(lp: LinearProgram, max_iter: int | None = None) -> LPResult:
    """Maximize ``lp``; status is ``optimal``, ``infeasible`` or ``unbounded``.

    On ``optimal`` the result carries the primal solution, its objective
    value and one dual value per original constraint (``y >= 0`` on ``<=``
    rows, ``y <= 0`` on ``>=`` rows for a maximization).
    """
    sf = _StandardForm(lp)
    m, nz = sf.A.shape

    # Column layout: [z (nz) | slack/surplus (ns) | artificial (na)]
    slack_cols = []
    art_rows = []
    for i, r in enumerate(sf.relations):
        if r in ("<=", ">="):
            slack_cols.append((i, 1.0 if r == "<=" else -1.0))
        if r in ("=", ">="):
            art_rows.append(i)
    ns, na = len(slack_cols), len(art_rows)
    N = nz + ns + na
    tab = np.zeros((m + 1, N + 1))
    tab[:m, :nz] = sf.A
    for s, (i, sgn) in enumerate(slack_cols):
        tab[i, nz + s] = sgn
    for a, i in enumerate(art_rows):
        tab[i, nz + ns + a] = 1.0
    tab[:m, -1] = sf.b

    basis = np.full(m, -1, dtype=int)
    for s, (i, sgn) in enumerate(slack_cols):
        if sgn > 0:
            basis[i] = nz + s
    for a, i in enumerate(art_rows):
        basis[i] = nz + ns + a

    if max_iter is None:
        max_iter = 10 * (N + m) ** 2
    iters = 0

    def set_objective(cost: np.ndarray):
        # bottom row holds reduced costs c_j - c_B B^-1 A_j and -c_B B^-1 b
        tab[m, :N] = cost
        tab[m, N] = 0.0
        tab[m, :] -= cost[basis] @ tab[:m, :]

    def pivot(r: int, j: int):
        tab[r, :] /= tab[r, j]
        col = tab[:, j].copy()
        col[r] = 0.0
        tab[:, :] -= np.outer(col, tab[r, :])
        tab[:, j] = 0.0
        tab[r, j] = 1.0
        basis[r] = j

    def run(allowed: np.ndarray, phase: int) -> str:
        nonlocal iters
        while True:
            red = tab[m, :N]
            cand = np.nonzero(allowed & (red > REDUCED_COST_TOL))[0]
            if cand.size == 0:
                return "optimal"
            j = int(cand[0])
            col = tab[:m, j]
            pos = np.nonzero(col > PIVOT_TOL)[0]
            if pos.size == 0:
                return "unbounded"
            ratios = tab[pos, N] / col[pos]
            best = ratios.min()
            ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(ties[np.argmin(basis[ties])])
            pivot(r, j)
            np.maximum(tab[:m, N], 0.0, out=tab[:m, N])
            iters += 1
            if iters > max_iter:
                raise SolverError(
                    f"simplex exceeded {max_iter} iterations in phase {phase}",
                    {"phase": phase, "iterations": iters, "basis": basis.tolist(), "objective_row": tab[m].tolist()},
                )

    art_start = nz + ns
    if na:
        cost1 = np.zeros(N)
        cost1[art_start:] = -1.0
        set_objective(cost1)
        run(np.ones(N, dtype=bool), 1)
        infeas = float(np.sum(tab[:m, N][basis >= art_start]))
        if infeas > PHASE1_TOL:
            return LPResult("infeasible", iterations=iters)
        # drive remaining (zero-level) artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= art_start:
                nz_cols = np.nonzero(np.abs(tab[i, :art_start]) > 1e-9)[0]
                if nz_cols.size:
                    pivot(i, int(nz_cols[0]))
                else:
                    keep[i] = False
        if not keep.all():
            tab = np.vstack([tab[:m][keep], tab[m:]])
            basis = basis[keep]
            m = int(keep.sum())
        kept_rows = np.nonzero(keep)[0]
    else:
        kept_rows = np.arange(m)

    cost2 = np.zeros(N)
    cost2[:nz] = sf.c
    set_objective(cost2)
    allowed = np.ones(N, dtype=bool)
    allowed[art_start:] = False
    status = run(allowed, 2)
    if status != "optimal":
        return LPResult(status, iterations=iters)

    z = np.zeros(N)
    z[basis] = tab[:m, N]
    x = sf.offset + sf.T @ z[:nz]
    value = float(np.dot(lp.objective, x))

    # duals y = c_B B^{-1} on the kept standard rows
    full = np.zeros((len(sf.b), N))
    full[:, :nz] = sf.A
    for s, (i, sgn) in enumerate(slack_cols):
        full[i, nz + s] = sgn
    for a, i in enumerate(art_rows):
        full[i, art_start + a] = 1.0
    B = full[np.ix_(kept_rows, basis)]
    try:
        y_kept = np.linalg.solve(B.T, cost2[basis])
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular final basis: {exc}", {"basis": basis.tolist()}) from None
    y_std = np.zeros(len(sf.b))
    y_std[kept_rows] = y_kept
    duals = (y_std * sf.sign)[: sf.n_orig_rows]

    _check_feasible(lp, x)
    return LPResult("optimal", value, x, duals, iters, tuple(int(b) for b in basis))


def _check_feasible(lp: LinearProgram, x: np.ndarray):
    worst = 0.0
    for con in lp.constraints:
        lhs = float(np.dot(con.coeffs, x))
        if con.relation == "<=":
            worst = max(worst, lhs - con.bound)
        elif con.relation == ">=":
            worst = max(worst, con.bound - lhs)
        else:
            worst = max(worst, abs(lhs - con.bound))
    for xk, (lo, hi) in zip(x, lp.bounds):
        worst = max(worst, lo - xk, xk - hi)
    if worst > FEASIBILITY_TOL:
        raise SolverError(f"simplex solution violates constraints by {worst:.3g}", {"solution": x.tolist()})


def format_tableau(lp: LinearProgram) -> str:
    """Text dump of the initial standard-form system, for debugging."""
    sf = _StandardForm(lp)
    lines = [f"maximize {np.array2string(sf.c, precision=6)} . z"]
    for row, rel, b in zip(sf.A, sf.relations, sf.b):
        lines.append(f"  {np.array2string(row, precision=6)} {rel} {b:.12g}")
    return "\n".join(lines)
