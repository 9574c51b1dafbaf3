"""Bipartite max-flow for partial couplings on an allowed set of cells.

Source -> row i (capacity ``supply[i]``) -> column j (unbounded, only where
``allowed[i, j]``) -> sink (capacity ``demand[j]``).  Augmenting paths are
found by BFS with capacity scaling; capacities are real, so augmentations
below ``FLOW_FLOOR`` are ignored to guarantee termination.
"""

from __future__ import annotations

import math
from collections import deque
from typing import NamedTuple

import numpy as np

from ..errors import InputError

FLOW_FLOOR = 1e-12
MASS_TOL = 1e-9


class FlowResult(NamedTuple):
    value: float
    flow: np.ndarray


def _validate(supply, demand, allowed):
    a = np.array(supply, dtype=float).ravel()
    b = np.array(demand, dtype=float).ravel()
    ok = np.array(allowed, dtype=bool)
    if ok.shape != (a.size, b.size):
        raise InputError(f"allowed mask shape {ok.shape} does not match ({a.size}, {b.size})")
    for name, v in (("supply", a), ("demand", b)):
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InputError(f"{name} must be finite and nonnegative")
        if abs(v.sum() - 1.0) > MASS_TOL:
            raise InputError(f"{name} sums to {v.sum()!r}, not 1")
    return a, b, ok


def _augmenting_path(residual: np.ndarray, source: int, sink: int, delta: float):
    parent = np.full(residual.shape[0], -1)
    parent[source] = source
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(residual[u] >= delta):
            if parent[v] < 0:
                parent[v] = u
                if v == sink:
                    return parent
                queue.append(v)
    return None


def max_coupling(supply, demand, allowed) -> FlowResult:
    """Maximum mass routable from ``supply`` to ``demand`` through allowed cells."""
    a, b, ok = _validate(supply, demand, allowed)
    m, n = ok.shape
    size = m + n + 2
    source, sink = 0, size - 1
    cap = np.zeros((size, size))
    cap[source, 1 : m + 1] = a
    cap[m + 1 : m + n + 1, sink] = b
    cap[1 : m + 1, m + 1 : m + n + 1] = np.where(ok, np.inf, 0.0)
    flow = np.zeros((size, size))

    top = max(float(a.max()), float(b.max()))
    delta = 2.0 ** math.floor(math.log2(top)) if top > 0 else 0.0
    # scaling phases, then a final phase at the floor
    while True:
        threshold = max(delta, FLOW_FLOOR)
        while True:
            residual = cap - flow
            parent = _augmenting_path(residual, source, sink, threshold)
            if parent is None:
                break
            path = []
            v = sink
            while v != source:
                path.append((parent[v], v))
                v = parent[v]
            push = min(residual[u, w] for u, w in path)
            for u, w in path:
                flow[u, w] += push
                flow[w, u] -= push
        if threshold <= FLOW_FLOOR:
            break
        delta /= 2.0

    middle = np.maximum(flow[1 : m + 1, m + 1 : m + n + 1], 0.0)
    return FlowResult(float(middle.sum()), middle)


def max_coupling_mass(supply, demand, allowed) -> float:
    return max_coupling(supply, demand, allowed).value
