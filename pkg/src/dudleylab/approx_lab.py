"""Finite-horizon experiments on sequences of pairs of probability measures.

A statement such as "``mu_j`` and ``nu_j`` become indistinguishable as
``j -> infinity``" cannot be decided from finitely many terms.  Every verdict
produced here is therefore a *demonstration*: values are compared against an
explicit decreasing threshold schedule on the second half of the horizon.

Four surrogates of asymptotic approximation are compared:

``ub_weak``
    ``max_f |<mu_j - nu_j, f>|`` over a fixed finite family of bounded
    Lipschitz test functions.
``bl``
    the bounded-Lipschitz distance.
``prokhorov``
    the Lévy–Prokhorov distance.
``coupling_tail``
    ``pi_j(d > delta)`` under the optimal BL coupling ``pi_j``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InputError
from .lipschitz import TabulatedFunction, blip_scale, separating_sequence_function
from .measure import ProbabilityMeasure, integrate, point_mass, pushforward
from .metric_space import FiniteMetricSpace, PointMap, from_real_points, lipschitz_constant_of_map, real_map
from .metrics import BL_TRUNCATION, bl_distance, bl_norm, levy_prokhorov

APPROXIMATES = "approximates"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"
DISAGREE = "disagree"

DEFAULT_DELTA = 0.25
DEFAULT_FAMILY_SIZE = 8
SCALE_TOL = 1e-12
RATIO_TOL = 1e-9
CSV_COLUMNS = ("j", "bl", "prokhorov", "ubweak_gap", "cbweak_gap", "coupling_tail", "verdict")
SUITE_MODES = ("ub_weak", "bl", "prokhorov", "coupling_tail")
HORIZON_NOTE = "finite-horizon demonstration; not a statement about limits"


# ---------------------------------------------------------------------------
# Sequences and test families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureSequencePair:
    """Pairs ``(mu_j, nu_j)`` for ``j = start, ..., start + J - 1``."""

    entries: tuple
    name: str = ""
    start: int = 1

    def __post_init__(self):
        entries = tuple((mu, nu) for mu, nu in self.entries)
        if not entries:
            raise InputError("a sequence pair needs at least one entry")
        for k, (mu, nu) in enumerate(entries):
            if not (isinstance(mu, ProbabilityMeasure) and isinstance(nu, ProbabilityMeasure)):
                raise InputError(f"entry {k} is not a pair of probability measures")
            if mu.space != nu.space:
                raise InputError(f"entry {k}: measures live on different spaces")
        object.__setattr__(self, "entries", entries)

    @property
    def horizon(self) -> int:
        return len(self.entries)

    @property
    def indices(self) -> list[int]:
        return list(range(self.start, self.start + self.horizon))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class TestFamily:
    """Finite family of test functions with a stated ``blip_scale`` bound.

    Members are either :class:`TabulatedFunction` objects on one fixed space
    (checked on construction) or callables on point labels, checked on every
    space they are tabulated on.
    """

    __test__ = False  # not a pytest class

    functions: tuple
    scale: float = 1.0
    name: str = ""

    def __post_init__(self):
        funcs = tuple(self.functions)
        object.__setattr__(self, "functions", funcs)
        for f in funcs:
            if isinstance(f, TabulatedFunction):
                self._check(f)
            elif not callable(f):
                raise InputError(f"family member {f!r} is neither tabulated nor callable")

    def _check(self, f: TabulatedFunction):
        s = blip_scale(f)
        if s > self.scale + SCALE_TOL:
            raise InputError(f"family member has scale {s!r} above the stated bound {self.scale!r}")

    def tabulate(self, space: FiniteMetricSpace) -> list[TabulatedFunction]:
        out = []
        for f in self.functions:
            if isinstance(f, TabulatedFunction):
                if f.space != space:
                    raise InputError("tabulated family member lives on a different space")
                out.append(f)
            else:
                try:
                    g = TabulatedFunction.from_callable(space, f)
                except (TypeError, ValueError) as exc:
                    raise InputError(f"family member cannot be evaluated on this space: {exc}") from None
                self._check(g)
                out.append(g)
        return out

    def gap(self, mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> float:
        """``max_f |<mu - nu, f>|`` (0 for an empty family)."""
        diff = mu - nu
        return max((abs(integrate(diff, f)) for f in self.tabulate(mu.space)), default=0.0)


def triangle_wave(amplitude: float, phase: float = 0.0) -> Callable[[float], float]:
    """Slope-one zigzag between ``-amplitude`` and ``amplitude`` (period ``4 * amplitude``)."""

    def wave(t):
        r = (float(t) - phase) % (4.0 * amplitude)
        return amplitude - abs(r - 2.0 * amplitude)

    wave.__name__ = f"wave_a{amplitude:g}_p{phase:g}"
    return wave


def tent_family(size: int = DEFAULT_FAMILY_SIZE) -> TestFamily:
    """Periodic tents on the real line, each bounded by 1 and 1-Lipschitz.

    Amplitudes halve from 1; each amplitude comes in two phases.
    """
    funcs = []
    k = 0
    while len(funcs) < size:
        a = 0.5**k
        funcs.append(triangle_wave(a, 0.0))
        if len(funcs) < size:
            funcs.append(triangle_wave(a, a))
        k += 1
    return TestFamily(tuple(funcs), 1.0, f"tent{size}")


def point_tent_family(space: FiniteMetricSpace) -> TestFamily:
    """``z -> max(1 - d(z, p), -1)`` for every point ``p`` of ``space``."""
    funcs = tuple(TabulatedFunction(space, np.maximum(1.0 - space.dist[:, p], -1.0)) for p in range(space.size))
    return TestFamily(funcs, 1.0, f"point_tents{space.size}")


def zero_family() -> TestFamily:
    return TestFamily((lambda t: 0.0,), 0.0, "zero")


def default_schedule(J: int) -> np.ndarray:
    """Thresholds ``2 / (j + 1)`` for ``j = 1..J``."""
    j = np.arange(1, J + 1)
    return 2.0 / (j + 1.0)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def _two_point(x: float, y: float):
    space = from_real_points([x, y])
    return point_mass(space, 0), point_mass(space, 1)


def gen_escape_pair(J: int) -> MeasureSequencePair:
    """``(delta_j, delta_{j + 1/j})`` on ``{j, j + 1/j}``, ``j = 1..J``."""
    if J < 1:
        raise InputError("horizon must be at least 1")
    return MeasureSequencePair(tuple(_two_point(j, j + 1.0 / j) for j in range(1, J + 1)), "escape")


def gen_point_pairs(xs: Sequence[float], ys: Sequence[float], name: str = "points") -> MeasureSequencePair:
    """``(delta_{x_j}, delta_{y_j})``; equal points give identical measures on a singleton."""
    entries = []
    for x, y in zip(xs, ys):
        if x == y:
            space = from_real_points([x])
            entries.append((point_mass(space, 0), point_mass(space, 0)))
        else:
            entries.append(_two_point(x, y))
    return MeasureSequencePair(tuple(entries), name)


def gen_real_mixture_pair(
    mu_atoms: Callable[[int], dict], nu_atoms: Callable[[int], dict], J: int, name: str = "mixture"
) -> MeasureSequencePair:
    """Pairs of finitely supported real measures given as ``{location: mass}`` per ``j``."""
    entries = []
    for j in range(1, J + 1):
        a, b = mu_atoms(j), nu_atoms(j)
        pts = sorted(set(a) | set(b))
        space = from_real_points(pts)
        mu = ProbabilityMeasure(space, [a.get(p, 0.0) for p in pts])
        nu = ProbabilityMeasure(space, [b.get(p, 0.0) for p in pts])
        entries.append((mu, nu))
    return MeasureSequencePair(tuple(entries), name)


def gen_constant_pair(mu: ProbabilityMeasure, nu: ProbabilityMeasure, J: int, name: str = "constant") -> MeasureSequencePair:
    return MeasureSequencePair(((mu, nu),) * J, name)


def gen_identical_pair(mu: ProbabilityMeasure, J: int, name: str = "identical") -> MeasureSequencePair:
    return MeasureSequencePair(((mu, mu),) * J, name)


def gen_mixing_pair(
    mu: ProbabilityMeasure, eta: ProbabilityMeasure, J: int, weight: Callable[[int], float], name: str = "mixing"
) -> MeasureSequencePair:
    """``(mu, (1 - w_j) mu + w_j eta)``."""
    if mu.space != eta.space:
        raise InputError("mu and eta live on different spaces")
    entries = []
    for j in range(1, J + 1):
        w = weight(j)
        entries.append((mu, ProbabilityMeasure(mu.space, (1.0 - w) * mu.mass + w * eta.mass)))
    return MeasureSequencePair(tuple(entries), name)


def random_metric_space(n: int, rng: np.random.Generator, edge_prob: float = 0.5, scale: float = 2.0) -> FiniteMetricSpace:
    """Shortest-path metric of a random connected weighted graph on ``n`` points."""
    w = rng.uniform(0.05, scale, size=(n, n))
    w = np.triu(w, 1)
    w = w + w.T
    edges = np.triu(rng.random((n, n)) < edge_prob, 1)
    edges = edges | edges.T
    for i in range(n - 1):  # a path keeps the graph connected
        edges[i, i + 1] = edges[i + 1, i] = True
    d = np.where(edges, w, np.inf)
    np.fill_diagonal(d, 0.0)
    for k in range(n):
        d = np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :])
    return FiniteMetricSpace(range(n), d)


def random_probability(space: FiniteMetricSpace, rng: np.random.Generator, sparsity: float = 0.0) -> ProbabilityMeasure:
    m = rng.random(space.size)
    if sparsity > 0:
        m = m * (rng.random(space.size) >= sparsity)
        if m.sum() == 0:
            m[rng.integers(space.size)] = 1.0
    return ProbabilityMeasure(space, m / m.sum())


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass
class ApproximationVerdict:
    """Finite-horizon evidence that one sequence approximates another.

    ``approximates``: every value in the second half of the horizon lies
    under its schedule threshold.  ``fails``: otherwise, and at least half of
    those values stay at or above ``floor`` (the last threshold unless given).
    Anything else is ``inconclusive``.
    """

    mode: str
    values: np.ndarray
    schedule: np.ndarray
    floor: float
    verdict: str
    indices: list = field(default_factory=list)
    note: str = HORIZON_NOTE

    @property
    def horizon(self) -> int:
        return len(self.values)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "horizon": self.horizon,
            "floor": self.floor,
            "values": [float(v) for v in self.values],
            "schedule": [float(s) for s in self.schedule],
            "note": self.note,
        }


def decide(values, schedule, floor: float | None = None) -> tuple[str, float]:
    values = np.asarray(values, dtype=float)
    schedule = np.asarray(schedule, dtype=float)
    if values.shape != schedule.shape:
        raise InputError(f"schedule length {schedule.size} does not match horizon {values.size}")
    if np.any(schedule <= 0) or np.any(np.diff(schedule) > 0):
        raise InputError("schedule must be positive and nonincreasing")
    J = values.size
    if floor is None:
        floor = float(schedule[-1])
    tail = slice(J // 2, J)
    if np.all(values[tail] <= schedule[tail]):
        return APPROXIMATES, floor
    above = int(np.sum(values[tail] >= floor))
    if above >= math.ceil((J - J // 2) / 2):
        return FAILS, floor
    return INCONCLUSIVE, floor


def _verdict(mode: str, values, schedule, indices, floor=None) -> ApproximationVerdict:
    verdict, floor = decide(values, schedule, floor)
    return ApproximationVerdict(mode, np.asarray(values, float), np.asarray(schedule, float), floor, verdict, indices)


def _schedule_for(pair: MeasureSequencePair, schedule) -> np.ndarray:
    return default_schedule(pair.horizon) if schedule is None else np.asarray(schedule, dtype=float)


def verdict_bl(pair: MeasureSequencePair, schedule=None, floor=None) -> ApproximationVerdict:
    values = [bl_distance(mu, nu).value for mu, nu in pair]
    return _verdict("bl", values, _schedule_for(pair, schedule), pair.indices, floor)


def verdict_prokhorov(pair: MeasureSequencePair, schedule=None, floor=None) -> ApproximationVerdict:
    values = [levy_prokhorov(mu, nu).value for mu, nu in pair]
    return _verdict("prokhorov", values, _schedule_for(pair, schedule), pair.indices, floor)


def verdict_ub_weak(pair: MeasureSequencePair, family: TestFamily, schedule=None, floor=None) -> ApproximationVerdict:
    """Ub-weak surrogate over ``family``.

    A fixed finite family only bounds the full quantifier from below; since
    every uniformly continuous bounded function is a uniform limit of
    members of ``n * BLip``, scale-``n`` families close the gap at the cost
    of the factor ``n``.
    """
    values = [family.gap(mu, nu) for mu, nu in pair]
    v = _verdict("ub_weak", values, _schedule_for(pair, schedule), pair.indices, floor)
    v.note = f"{HORIZON_NOTE}; family {family.name or 'custom'} of scale {family.scale:g}"
    return v


def coupling_tail(coupling, delta: float) -> float:
    space = coupling.row_space
    return float(math.fsum(coupling.plan[space.dist > delta]))


def verdict_coupling_tail(pair: MeasureSequencePair, delta: float = DEFAULT_DELTA, schedule=None, floor=None):
    values = [coupling_tail(bl_distance(mu, nu).coupling, delta) for mu, nu in pair]
    return _verdict("in_probability", values, _schedule_for(pair, schedule), pair.indices, floor)


def separating_gap(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> float:
    """``|<mu - nu, f_sep>|`` for the separating function; NaN off the real line."""
    if not mu.space.is_real_line:
        return math.nan
    f = TabulatedFunction(mu.space, separating_sequence_function(mu.space.coordinates))
    return abs(integrate(mu - nu, f))


# ---------------------------------------------------------------------------
# Counterexample, coupled sampling and pushforward checks
# ---------------------------------------------------------------------------


@dataclass
class CbWeakReport:
    indices: list
    bl_values: np.ndarray
    gaps: np.ndarray
    bl_verdict: ApproximationVerdict
    cb_verdict: ApproximationVerdict

    @property
    def conclusion(self) -> str:
        if self.bl_verdict.verdict == APPROXIMATES and self.cb_verdict.verdict == FAILS:
            return "Cb-weak surrogate stays at gap 1 on the escape pair while BL approximates"
        return (
            f"no counterexample at this horizon: bl {self.bl_verdict.verdict}, "
            f"cb-weak {self.cb_verdict.verdict}"
        )


def cb_weak_counterexample(J: int, schedule=None) -> CbWeakReport:
    """Escape pair: BL distances ``1/j`` vanish while the separating gap stays 1."""
    pair = gen_escape_pair(J)
    sched = _schedule_for(pair, schedule)
    bl_values = np.array([bl_distance(mu, nu).value for mu, nu in pair])
    gaps = np.array([separating_gap(mu, nu) for mu, nu in pair])
    return CbWeakReport(
        pair.indices,
        bl_values,
        gaps,
        _verdict("bl", bl_values, sched, pair.indices),
        _verdict("cb_weak_counterexample", gaps, sched, pair.indices),
    )


@dataclass
class A1Row:
    j: int
    bl: float
    coupling_cost: float
    exact_tail: float
    empirical_tail: float
    markov_bound: float

    @property
    def markov_holds(self) -> bool:
        return self.exact_tail <= self.markov_bound


@dataclass
class A1Report:
    delta: float
    seed: int
    samples: int
    rows: list

    @property
    def markov_holds(self) -> bool:
        return all(r.markov_holds for r in self.rows)


def check_a1_coupled_sample(pair: MeasureSequencePair, delta: float, seed: int, samples: int) -> A1Report:
    """Sample ``(X_j, Y_j)`` from the optimal BL coupling and compare tails.

    The exact tail ``pi_j(d > delta)`` is bounded by Markov's inequality
    applied to ``min(d, 2)``: ``pi_j(d > delta) <= E[min(d, 2)] / min(delta, 2)``,
    and ``E[min(d, 2)]`` is the BL distance.  Sampling uses one child stream
    of ``SeedSequence(seed)`` per index.
    """
    if not delta > 0:
        raise InputError(f"delta must be positive, got {delta!r}")
    if samples < 1:
        raise InputError("samples must be at least 1")
    streams = np.random.SeedSequence(seed).spawn(pair.horizon)
    cut = min(delta, BL_TRUNCATION)
    rows = []
    for j, (mu, nu), ss in zip(pair.indices, pair, streams):
        res = bl_distance(mu, nu)
        d = mu.space.dist
        plan = res.coupling.plan
        cost = math.fsum((plan * np.minimum(d, BL_TRUNCATION)).ravel())
        exact = coupling_tail(res.coupling, delta)
        probs = plan.ravel() / plan.sum()
        cells = np.random.default_rng(ss).choice(probs.size, size=samples, p=probs)
        empirical = float(np.mean(d.ravel()[cells] > delta))
        rows.append(A1Row(j, res.value, cost, exact, empirical, cost / cut))
    return A1Report(delta, seed, samples, rows)


@dataclass
class A2Row:
    j: int
    lipschitz: float
    source_bl: float
    image_bl: float
    ratio: float  # NaN when the source distance is below 1e-12
    bound: float

    @property
    def ok(self) -> bool:
        return math.isnan(self.ratio) or self.ratio <= self.bound + RATIO_TOL


@dataclass
class A2Report:
    n: int
    rows: list
    image_pair: MeasureSequencePair

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    @property
    def max_ratio(self) -> float:
        ratios = [r.ratio for r in self.rows if not math.isnan(r.ratio)]
        return max(ratios, default=0.0)


def check_a2_pushforward(pair: MeasureSequencePair, maps: Sequence[PointMap], n: int) -> A2Report:
    """Push each pair forward into ``[-n, n]`` and bound the BL contraction ratio by ``max(1, L_j)``."""
    if n < 1:
        raise InputError("n must be a positive integer")
    if len(maps) != pair.horizon:
        raise InputError(f"{len(maps)} maps for a horizon of {pair.horizon}")
    rows, images = [], []
    for j, (mu, nu), phi in zip(pair.indices, pair, maps):
        if phi.source != mu.space:
            raise InputError(f"map {j} does not start on the entry's space")
        coords = phi.target.coordinates
        if np.any(np.abs(coords) > n):
            raise InputError(f"map {j} leaves [-{n}, {n}]: image range [{coords.min()}, {coords.max()}]")
        pm, pn = pushforward(phi, mu), pushforward(phi, nu)
        images.append((pm, pn))
        L = lipschitz_constant_of_map(phi)
        src = bl_distance(mu, nu).value
        img = bl_distance(pm, pn).value
        ratio = img / src if src >= 1e-12 else math.nan
        rows.append(A2Row(j, L, src, img, ratio, max(1.0, L)))
    return A2Report(n, rows, MeasureSequencePair(tuple(images), f"{pair.name}-image", pair.start))


def halving_maps(pair: MeasureSequencePair, n: int) -> list[PointMap]:
    """``x -> clip(x / 2, -n, n)`` on each real-line entry."""
    return [real_map(mu.space, lambda x: min(max(x / 2.0, -n), n)) for mu, _ in pair]


# ---------------------------------------------------------------------------
# Equivalence suite
# ---------------------------------------------------------------------------


@dataclass
class SuiteRow:
    j: int
    bl: float
    prokhorov: float
    ubweak_gap: float
    cbweak_gap: float
    coupling_tail: float


@dataclass
class SuiteReport:
    name: str
    rows: list
    verdicts: dict
    delta: float
    family: str

    @property
    def agree(self) -> bool:
        return len({v.verdict for v in self.verdicts.values()}) == 1

    @property
    def verdict(self) -> str:
        if self.agree:
            return next(iter(self.verdicts.values())).verdict
        return DISAGREE

    @property
    def findings(self) -> list[str]:
        if self.agree:
            return []
        return [f"surrogates disagree: " + ", ".join(f"{k}={v.verdict}" for k, v in self.verdicts.items())]

    def summary(self) -> str:
        if self.agree:
            return f"all surrogates agree: {self.verdict}"
        return self.findings[0]


def index_row(j: int, mu: ProbabilityMeasure, nu: ProbabilityMeasure, family: TestFamily, delta: float) -> SuiteRow:
    bl = bl_distance(mu, nu)
    return SuiteRow(
        j,
        bl.value,
        levy_prokhorov(mu, nu).value,
        family.gap(mu, nu),
        separating_gap(mu, nu),
        coupling_tail(bl.coupling, delta),
    )


def equivalence_suite(
    pair: MeasureSequencePair, family: TestFamily, schedule=None, delta: float = DEFAULT_DELTA
) -> SuiteReport:
    """Verdicts of all four surrogates on one sequence pair.

    Disagreement is reported, never reconciled.
    """
    if not delta > 0:
        raise InputError(f"delta must be positive, got {delta!r}")
    sched = _schedule_for(pair, schedule)
    rows = [index_row(j, mu, nu, family, delta) for j, (mu, nu) in zip(pair.indices, pair)]
    columns = {
        "ub_weak": [r.ubweak_gap for r in rows],
        "bl": [r.bl for r in rows],
        "prokhorov": [r.prokhorov for r in rows],
        "coupling_tail": [r.coupling_tail for r in rows],
    }
    verdicts = {mode: _verdict(mode, vals, sched, pair.indices) for mode, vals in columns.items()}
    return SuiteReport(pair.name, rows, verdicts, delta, family.name)


# ---------------------------------------------------------------------------
# Corpus and CSV
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusCase:
    pair: MeasureSequencePair
    family: TestFamily
    expected: str


def _shared_family(mu: ProbabilityMeasure, nu: ProbabilityMeasure | None = None) -> TestFamily:
    funcs = point_tent_family(mu.space).functions
    if nu is not None:
        funcs = funcs + (bl_norm(mu - nu).witness,)
    return TestFamily(funcs, 1.0, f"point_tents{mu.space.size}" + ("+witness" if nu is not None else ""))


def demo_corpus(J: int = 20, seed: int = 0) -> list[CorpusCase]:
    """Ten sequence pairs built to approximate and ten built to fail."""
    rng = np.random.default_rng(seed)
    tents = tent_family()
    cases: list[CorpusCase] = []

    def add(pair, expected, family=tents):
        cases.append(CorpusCase(pair, family, expected))

    # designed to approximate
    add(gen_escape_pair(J), APPROXIMATES)
    add(gen_point_pairs([0.0] * J, [1.0 / j for j in range(1, J + 1)], "shrinking-shift"), APPROXIMATES)
    add(gen_point_pairs([5.0] * J, [5.0 - 0.7 / j for j in range(1, J + 1)], "shrinking-shift-left"), APPROXIMATES)
    add(gen_point_pairs([0.0] * J, [(-1.0) ** j / j for j in range(1, J + 1)], "alternating-shift"), APPROXIMATES)
    add(
        gen_real_mixture_pair(
            lambda j: {0.0: 0.5, 1.0: 0.5}, lambda j: {0.5 / j: 0.5, 1.0 + 0.5 / j**2: 0.5}, J, "two-atom-shrink"
        ),
        APPROXIMATES,
    )
    add(
        gen_real_mixture_pair(
            lambda j: {float(j * j): 0.5, -float(j): 0.5},
            lambda j: {j * j + 1.0 / j: 0.5, -j - 1.0 / j: 0.5},
            J,
            "two-atom-escape",
        ),
        APPROXIMATES,
    )
    line = from_real_points([0.0, 1.0, 2.0, 3.0])
    add(
        gen_mixing_pair(
            ProbabilityMeasure(line, [0.25] * 4), ProbabilityMeasure(line, [1, 0, 0, 0]), J, lambda j: 1.0 / j**2, "line-mixing"
        ),
        APPROXIMATES,
    )
    space = random_metric_space(8, rng)
    mu = random_probability(space, rng)
    add(gen_mixing_pair(mu, random_probability(space, rng), J, lambda j: 1.0 / j**2, "graph-mixing"), APPROXIMATES, _shared_family(mu))
    add(gen_identical_pair(mu, J, "graph-identical"), APPROXIMATES, _shared_family(mu))
    space2 = random_metric_space(6, rng)
    base = random_probability(space2, rng)
    add(
        gen_mixing_pair(base, random_probability(space2, rng, 0.5), J, lambda j: 0.5 / j**2, "graph-mixing-sparse"),
        APPROXIMATES,
        _shared_family(base),
    )

    # designed to fail
    add(gen_point_pairs([0.0] * J, [1.0] * J, "separated"), FAILS)
    add(gen_point_pairs([float(j) for j in range(1, J + 1)], [j + 1.0 for j in range(1, J + 1)], "escape-unit-gap"), FAILS)
    add(gen_real_mixture_pair(lambda j: {0.0: 0.5, 1.0: 0.5}, lambda j: {0.0: 1.0}, J, "half-mixture"), FAILS)
    add(gen_point_pairs([0.0] * J, [0.5 + 1.0 / j for j in range(1, J + 1)], "gap-to-half"), FAILS)
    add(gen_point_pairs([float(j) for j in range(1, J + 1)], [-float(j) for j in range(1, J + 1)], "mirror"), FAILS)
    add(gen_real_mixture_pair(lambda j: {0.0: 1.0}, lambda j: {0.0: 0.6, 3.0: 0.4}, J, "leak"), FAILS)
    add(gen_point_pairs([j / 3.0 for j in range(1, J + 1)], [j / 3.0 + 0.3 for j in range(1, J + 1)], "sliding"), FAILS)
    add(
        gen_real_mixture_pair(lambda j: {0.0: 0.5, 1.0: 0.5}, lambda j: {0.5: 0.5, 1.5: 0.5}, J, "half-shift"),
        FAILS,
    )
    a, b = random_probability(space, rng), random_probability(space, rng)
    add(gen_constant_pair(a, b, J, "graph-constant"), FAILS, _shared_family(a, b))
    c, e = random_probability(space2, rng, 0.3), random_probability(space2, rng, 0.3)
    add(gen_constant_pair(c, e, J, "graph-constant-sparse"), FAILS, _shared_family(c, e))
    return cases


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    return "" if math.isnan(x) else repr(x)


def rows_to_csv(rows: Sequence[SuiteRow], verdict: str, header: str | None = None) -> str:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [_fmt(r.j), _fmt(r.bl), _fmt(r.prokhorov), _fmt(r.ubweak_gap), _fmt(r.cbweak_gap), _fmt(r.coupling_tail), verdict]
        )
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))
