"""Exit criteria of the package.

Each test prints one ``PASS``/``FAIL`` line (visible with ``-s``) and records
it for the terminal summary.  Run with::

    pytest tests/test_acceptance.py -s
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from dudleylab.approx_lab import (
    MeasureSequencePair,
    check_a1_coupled_sample,
    check_a2_pushforward,
    demo_corpus,
    equivalence_suite,
    random_metric_space,
    random_probability,
    read_csv,
)
from dudleylab.io import function_to_obj, measure_to_obj, space_to_obj
from dudleylab.lipschitz import TabulatedFunction, blip_scale, regularize
from dudleylab.metric_space import PointMap, from_real_points
from dudleylab.metrics import bl_distance, bl_norm, levy_prokhorov, prokhorov_bruteforce, truncated_cost, tv_distance
from dudleylab.solvers import TransportProblem, solve_transport

pytestmark = pytest.mark.acceptance


@pytest.fixture
def criterion(record_property):
    def report(number: int, title: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        print(line)
        record_property("criterion", line)
        assert ok, line

    return report


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "dudleylab.cli", *argv], capture_output=True, check=False)
    return proc.returncode, proc.stdout, proc.stderr


def test_1_bl_duality(criterion):
    rng = np.random.default_rng(20240601)
    worst = 0.0
    start = time.perf_counter()
    for _ in range(200):
        space = random_metric_space(int(rng.integers(3, 21)), rng)
        mu, nu = random_probability(space, rng), random_probability(space, rng)
        primal = bl_norm(mu - nu).value
        dual = solve_transport(TransportProblem(mu.mass, nu.mass, truncated_cost(space)), method="network").value
        worst = max(worst, abs(primal - dual))
    elapsed = time.perf_counter() - start
    criterion(1, "BL primal LP = min(d,2) transport", worst <= 1e-8 and elapsed < 30,
              f"200 instances, max gap {worst:.2e}, {elapsed:.1f}s")


def test_2_prokhorov_oracle(criterion):
    rng = np.random.default_rng(20240602)
    worst = 0.0
    start = time.perf_counter()
    for k in range(100):
        space = random_metric_space(int(rng.integers(2, 11)), rng)
        sparsity = 0.4 if k % 2 else 0.0
        mu, nu = random_probability(space, rng, sparsity), random_probability(space, rng, sparsity)
        worst = max(worst, abs(levy_prokhorov(mu, nu).value - prokhorov_bruteforce(mu, nu)))
    elapsed = time.perf_counter() - start
    criterion(2, "flow Levy-Prokhorov = subset brute force", worst <= 1e-9 and elapsed < 60,
              f"100 instances, max difference {worst:.2e}, {elapsed:.1f}s")


def test_3_regularization(criterion):
    rng = np.random.default_rng(20240603)
    slack = 1e-12
    failures = []
    for k in range(100):
        if k % 2:
            space = random_metric_space(int(rng.integers(1, 13)), rng)
        else:
            space = from_real_points(np.unique(rng.uniform(-3, 3, int(rng.integers(1, 13)))))
        f = TabulatedFunction(space, rng.uniform(-5, 5, space.size) * rng.choice([0.01, 1.0, 10.0]))
        eps = float(10 ** rng.uniform(-3, 0.5))
        g, n, theta = regularize(f, eps)
        lower = max(f.sup_norm + eps, 2 * f.sup_norm / theta)
        ok = (
            np.all(f.values - eps <= g.values + slack)
            and np.all(g.values <= f.values + slack)
            and blip_scale(g) <= n + slack * n
            and n >= lower - slack
        )
        if not ok:
            failures.append(k)
    criterion(3, "regularization sandwich and scale", not failures, f"100 cases, failing cases {failures}")


def test_4_escape_counterexample(criterion):
    code, out, _ = _cli("demo", "escape", "--horizon", "20")
    rows = read_csv(out.decode())
    js = [int(r["j"]) for r in rows]
    bl_err = max(abs(float(r["bl"]) - 1.0 / j) for r, j in zip(rows, js))
    gaps = {float(r["cbweak_gap"]) for r in rows}
    ok = code == 0 and js == list(range(1, 21)) and bl_err < 1e-12 and gaps == {1.0}
    criterion(4, "escape demo: bl = 1/j and separating gap = 1", ok,
              f"{len(rows)} rows, max |bl - 1/j| {bl_err:.1e}, gaps {sorted(gaps)}")


def test_5_pushforward_contraction(criterion):
    rng = np.random.default_rng(20240605)
    worst_excess = -math.inf
    for k in range(100):
        n = int(rng.integers(1, 5))
        if k % 2:
            source = random_metric_space(int(rng.integers(2, 9)), rng)
        else:
            source = from_real_points(np.unique(rng.uniform(-10, 10, int(rng.integers(2, 9)))))
        mu, nu = random_probability(source, rng, 0.2), random_probability(source, rng, 0.2)
        targets = np.unique(rng.uniform(-n, n, int(rng.integers(1, source.size + 1))))
        image = tuple(int(i) for i in rng.integers(0, targets.size, source.size))
        phi = PointMap(source, from_real_points(targets), image)
        rep = check_a2_pushforward(MeasureSequencePair(((mu, nu),)), [phi], n)
        row = rep.rows[0]
        if not math.isnan(row.ratio):
            worst_excess = max(worst_excess, row.ratio - row.bound)
    criterion(5, "pushforward ratio <= max(1, L)", worst_excess <= 1e-9,
              f"100 instances, max ratio - bound {worst_excess:.2e}")


def test_6_corpus_co_movement(criterion):
    delta = 0.25
    corpus = demo_corpus(20, seed=0)
    mismatches, markov_bad = [], []
    for case in corpus:
        suite = equivalence_suite(case.pair, case.family, delta=delta)
        if not (suite.agree and suite.verdict == case.expected):
            mismatches.append(f"{case.pair.name}: {suite.summary()}")
        rep = check_a1_coupled_sample(case.pair, delta, 0, 100)
        cut = min(delta, 2.0)
        for row in rep.rows:
            if not (row.exact_tail <= row.coupling_cost / cut and row.exact_tail <= row.bl / cut):
                markov_bad.append((case.pair.name, row.j))
    n_ok = sum(c.expected == "approximates" for c in corpus)
    criterion(6, "four surrogates agree on the corpus; Markov bound", len(corpus) == 20 and not mismatches and not markov_bad,
              f"{len(corpus)} pairs ({n_ok} approximating), disagreements {mismatches}, Markov violations {markov_bad}")


def test_7_metric_axioms(criterion):
    rng = np.random.default_rng(20240607)
    problems = []
    for k in range(100):
        space = random_metric_space(int(rng.integers(2, 9)), rng)
        a, b, c = (random_probability(space, rng, 0.2 if k % 3 == 0 else 0.0) for _ in range(3))
        for name, dist in (("bl", lambda x, y: bl_distance(x, y).value), ("lp", lambda x, y: levy_prokhorov(x, y).value)):
            ab, ba, bc, ac = dist(a, b), dist(b, a), dist(b, c), dist(a, c)
            if ab != ba:
                problems.append((k, name, "symmetry"))
            if dist(a, a) > 1e-9 or (tv_distance(a, b) > 1e-6 and ab <= 1e-9):
                problems.append((k, name, "identity"))
            if ac > ab + bc + 1e-8:
                problems.append((k, name, "triangle"))
    criterion(7, "bl and Levy-Prokhorov are metrics", not problems, f"100 triples, problems {problems}")


def test_8_determinism(criterion, tmp_path):
    rng = np.random.default_rng(20240608)
    space = random_metric_space(6, rng)
    (tmp_path / "space.json").write_text(json.dumps(space_to_obj(space)))
    for name in ("mu", "nu"):
        (tmp_path / f"{name}.json").write_text(json.dumps(measure_to_obj(random_probability(space, rng))))
    f = TabulatedFunction(space, rng.uniform(-1, 1, space.size))
    (tmp_path / "f.json").write_text(json.dumps(function_to_obj(f)))
    mu, nu, sp, fp = (str(tmp_path / n) for n in ("mu.json", "nu.json", "space.json", "f.json"))
    commands = [
        ("validate", sp),
        ("dist", "bl", mu, nu, "--coupling", "--witness", "--crosscheck"),
        ("dist", "prokhorov", mu, nu, "--coupling", "--crosscheck"),
        ("dist", "tv", mu, nu, "--crosscheck"),
        ("coupling", mu, nu, "--metric", "strassen", "--epsilon", "0.5"),
        ("regularize", fp, "--epsilon", "0.1"),
        ("demo", "escape", "--horizon", "8", "--seed", "4"),
        ("demo", "equivalence", "--horizon", "8", "--seed", "4"),
        ("demo", "a1", "--horizon", "8", "--seed", "4"),
        ("demo", "a2", "--horizon", "8", "--seed", "4"),
    ]
    differing = []
    for cmd in commands:
        first, second = _cli(*cmd), _cli(*cmd)
        if first != second or first[0] != 0:
            differing.append(" ".join(cmd[:2]))
    criterion(8, "repeated CLI runs are byte-identical", not differing,
              f"{len(commands)} commands run twice, differing or failing: {differing}")
