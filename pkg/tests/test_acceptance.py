"""Acceptance criteria AC1..AC9.

Each test records a one-line result in ``conftest.ACCEPTANCE``; the terminal
summary prints them after the run.  Tests still fail normally when a
criterion is not met.
"""
import random
import time

import pytest

from refinekit import (BudgetExceeded, gen_ladder, gen_random, minimise, observe, oracle_refines,
                       random_pair, refines, run_with_instrumentation, shortest_witness_distance)

from conftest import ACCEPTANCE, load

RELATIONS = ("tr", "sfr", "fdr")
STRATEGIES = ("df", "bf")
SUITE_SIZE = 1000


def record(name, ok, detail):
    ACCEPTANCE[name] = (ok, detail)
    print(f"{name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@pytest.fixture(scope="module")
def suite():
    return [random_pair(seed) for seed in range(SUITE_SIZE)]


def test_ac1_fixture_verdict_matrix():
    start = time.perf_counter()
    s0, t0, u0 = load("spec_s0"), load("impl_t0"), load("impl_u0")
    matrix = [
        (s0, t0, "tr", True), (s0, t0, "sfr", False), (s0, u0, "sfr", True),
        (s0, u0, "fdr", False), (u0, t0, "fdr", True), (u0, s0, "tr", False),
        (u0, s0, "sfr", False), (s0, t0, "fdr", False),
    ]
    wrong = [(r, st) for spec, impl, r, want in matrix for st in STRATEGIES
             if refines(spec, impl, relation=r, strategy=st).refines != want]
    elapsed = time.perf_counter() - start
    record("AC1", not wrong and elapsed < 1.0,
           f"{2 * len(matrix) - len(wrong)}/{2 * len(matrix)} verdicts correct in {elapsed:.3f}s (< 1s)")


def test_ac2_bug_reproduction():
    s0, s1, s2, s3 = (load(f"incorrect_s{i}") for i in range(4))
    got = (
        refines(s0, s1, relation="fdr").refines,
        refines(s0, s1, relation="fdr", variant="legacy", allow_unsound=True).refines,
        refines(s2, s3, relation="fdr", variant="legacy", allow_unsound=True).refines,
    )
    record("AC2", got == (True, False, True),
           f"improved s0/s1={got[0]}, legacy s0/s1={got[1]}, legacy s2/s3={got[2]} "
           "(want True, False, True)")


def test_ac3_oracle_equivalence(suite):
    start = time.perf_counter()
    disagreements = []
    for seed, (spec, impl) in enumerate(suite):
        for r in RELATIONS:
            expected = oracle_refines(spec, impl, r)
            for st in STRATEGIES:
                if refines(spec, impl, relation=r, strategy=st).refines != expected:
                    disagreements.append((seed, r, st))
    elapsed = time.perf_counter() - start
    checks = len(suite) * len(RELATIONS) * len(STRATEGIES)
    record("AC3", not disagreements and elapsed < 120,
           f"{len(disagreements)} disagreements in {checks} checks over {len(suite)} pairs, "
           f"{elapsed:.1f}s (< 120s)")


def test_ac4_antichain_properness(suite):
    improved_violations = 0
    for spec, impl in suite:
        for r in RELATIONS:
            for st in STRATEGIES:
                _, log = run_with_instrumentation(spec, impl, relation=r, strategy=st)
                improved_violations += len(log.violations)
    spec, impl = load("violation_spec"), load("violation_impl")
    _, log = run_with_instrumentation(spec, impl, relation="tr", variant="legacy")
    proper = sum("not proper" in v for _, v in log.violations)
    stored = {(p.spec.states, p.impl) for p in log.final_antichain}
    both = {((1,), 1), ((1, 2), 1)} <= stored
    record("AC4", improved_violations == 0 and proper >= 1 and both,
           f"improved violations={improved_violations}; legacy properness violations={proper}, "
           f"final set holds ({{t1}},s1) and ({{t1,t2}},s1): {both}")


def test_ac5_ladder_metrics():
    problems = []
    hand = refines(gen_ladder(3, 2), gen_ladder(3, 2), strategy="df").metrics
    if hand.membership_tests != 4:
        problems.append(f"hand count n=3,k=2 gave {hand.membership_tests} tests")
    for n in (3, 50, 100):
        lts = gen_ladder(n, n)
        m = refines(lts, lts, strategy="df").metrics
        if m.working_max != 1 or m.membership_tests != (n - 1) * n:
            problems.append(f"n=k={n}: working_max={m.working_max}, tests={m.membership_tests}")
    n, k = 3, 2
    lts = gen_ladder(n, k)
    _, log = run_with_instrumentation(lts, lts, strategy="df", variant="legacy")
    sizes = [e["working_size"] for e in log.entries]
    want = [i * (k - 1) + 1 for i in range(1, n)]
    if sizes[:n - 1] != want:
        problems.append(f"legacy working sizes {sizes[:n - 1]} != {want}")
    record("AC5", not problems,
           "; ".join(problems) or "improved DF working_max=1 and (n-1)k tests for n=k in {3,50,100}; "
           f"legacy DF working sizes {want} at n=3,k=2")


def test_ac6_bf_blowup():
    n = k = 10
    lts = gen_ladder(n, k)
    try:
        refines(lts, lts, strategy="bf", variant="legacy", node_budget=10**6)
        exceeded = False
    except BudgetExceeded:
        exceeded = True
    v = refines(lts, lts, strategy="bf")
    misses = v.metrics.antichain_misses
    record("AC6", exceeded and v.refines and misses <= n * k + 1,
           f"legacy BF budget exceeded: {exceeded}; improved BF refines={v.refines} with "
           f"{misses} misses (<= {n * k + 1})")


def test_ac7_minimisation_soundness(suite):
    verdict_bad = 0
    for spec, impl in suite:
        reduced = minimise(spec)
        for r in RELATIONS:
            if refines(reduced, impl, relation=r).refines != refines(spec, impl, relation=r).refines:
                verdict_bad += 1
    obs_bad = 0
    for seed in range(200):
        rng = random.Random(seed)
        lts = gen_random(rng.randint(1, 5), rng.randint(1, 3), rng.uniform(0.2, 0.5),
                         rng.uniform(0.0, 0.4), seed)
        bound = 2 * lts.num_states
        if observe(lts, bound, lts.act) != observe(minimise(lts), bound, lts.act):
            obs_bad += 1
    record("AC7", verdict_bad == 0 and obs_bad == 0,
           f"{verdict_bad} verdict disagreements over {len(suite)} pairs x 3 relations; "
           f"{obs_bad} observation mismatches over 200 LTSs")


def test_ac8_bf_counterexample_minimality(suite):
    failing = mismatched = visible_longer = 0
    for spec, impl in suite:
        for r in RELATIONS:
            v = refines(spec, impl, relation=r, strategy="bf")
            if v.refines:
                continue
            failing += 1
            d = shortest_witness_distance(spec, impl, r)
            if len(v.path) != d.value:
                mismatched += 1
            if len(v.counterexample) != d.visible:
                visible_longer += 1
    record("AC8", mismatched == 0 and failing > 0,
           f"{mismatched} length mismatches over {failing} failing instances "
           f"(product steps; {visible_longer} counterexamples exceed the visible-only minimum)")


def test_ac9_performance_direction():
    lts = gen_ladder(500, 500)
    start = time.perf_counter()
    v = refines(lts, lts, strategy="df")
    improved = time.perf_counter() - start
    # legacy only needs to run long enough to show a 10x gap
    limit = 10 * improved
    start = time.perf_counter()
    try:
        refines(lts, lts, strategy="df", variant="legacy", time_budget=limit)
        legacy, finished = time.perf_counter() - start, True
    except BudgetExceeded:
        legacy, finished = time.perf_counter() - start, False
    ratio = legacy / improved
    ok = v.refines and improved < 30 and (not finished or ratio >= 10)
    tail = f"{ratio:.1f}x" if finished else f"> {limit:.1f}s time budget, ratio >= 10x"
    record("AC9", ok, f"improved DF {improved:.2f}s (< 30s); legacy DF {legacy:.2f}s ({tail})")
