"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run ``pytest tests/test_acceptance.py -v`` (the lines also appear in the
terminal summary) or ``python3 tests/test_acceptance.py`` directly.
"""

import json
import random
import sys
import time
from collections import Counter
from contextlib import redirect_stdout
from io import StringIO
from itertools import combinations
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest
from conftest import ACCEPTANCE_LINES, random_divisor_sequence, random_subspace_of

from binarybn.census import (
    Confidence,
    census,
    census_seeds,
    count_points,
    counterexample_report,
    enumerate_subspaces,
    schubert_count,
    strata_counts,
)
from binarybn.cli import main
from binarybn.curvemodel import (
    MultiDegree,
    is_balanced,
    make_polarization,
    partial_normalization,
    quasistable_strata,
    random_curve,
)
from binarybn.exactalg import PrimeField, rank_rows
from binarybn.ramification import (
    degree_bounds,
    expected_dim,
    is_admissible,
    is_d_bounded,
    normalize_sequence,
    staircase,
)
from binarybn.sections import (
    line_bundle,
    meets_ramification,
    multi_vanishing_sequence,
    section_space,
    vanishing_subspace,
)

PRIMES = (7, 11, 13)
SEEDS = (0, 1, 2)


def report(n, ok, elapsed, limit, detail):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g}s)" if limit else ""
    line = f"criterion {n}: {status}  {elapsed:.1f}s{budget}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok and within


def reference_rho(g, r, d, a=()):
    rho = g - (r + 1) * (g - d + r)
    if a:
        rho -= sum(x - j for j, x in enumerate(a))
        rho -= sum(m * (m - 1) // 2 for m in Counter(a).values())
    return rho


# -- 1


HAND_PICKED = [
    (2, 0, 1, 1), (4, 1, 3, 0), (0, 0, 0, 0), (0, 1, 1, 0), (0, 1, 4, 6), (1, 0, 0, 0),
    (1, 1, 2, 1), (1, 1, 1, -1), (2, 1, 2, 0), (2, 1, 3, 2), (2, 1, 4, 4), (3, 1, 3, 1),
    (3, 1, 4, 3), (3, 2, 5, 3), (3, 2, 6, 6), (4, 1, 2, -2), (5, 2, 7, 5), (6, 1, 4, 0),
    (6, 2, 8, 6), (10, 3, 12, 6),
]


def check_rho():
    bad = []
    for g, r, d, want in HAND_PICKED:
        # hand-entered values double-check the reference itself
        assert reference_rho(g, r, d) == want
        doc = _cli_json("rho", "--g", str(g), "--r", str(r), "--d", str(d))
        if doc["rho"] != want:
            bad.append((g, r, d))
    rng = random.Random("acceptance/1")
    checked = 0
    while checked < 50:
        r = rng.randint(0, 3)
        D = random_divisor_sequence(rng, rng.randint(r, r + 3), 2)
        a = sorted(rng.choice([s.deg for s in D]) for _ in range(r + 1))
        if not is_admissible(a, D):
            continue
        g, d = rng.randint(0, 6), rng.randint(0, 12)
        ram = ",".join(map(str, a)) + "@" + ";".join(f"({s.a1},{s.a2})" for s in D)
        doc = _cli_json("rho", "--g", str(g), "--r", str(r), "--d", str(d), "--ram", ram)
        if doc["rho"] != reference_rho(g, r, d, a):
            bad.append((g, r, d, a))
        checked += 1
    return not bad, f"20 hand-picked + 50 ramified, mismatches {bad}"


def _cli(*argv):
    buf = StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def _cli_json(*argv):
    code, out = _cli(*argv, "--json")
    assert code == 0, argv
    return json.loads(out)


def test_criterion_1_rho():
    t = time.perf_counter()
    ok, detail = check_rho()
    assert report(1, ok, time.perf_counter() - t, 1.0, detail)


# -- 2


def subspace_profiles(n, k, q):
    """For every V in Gr(k, n)(F_q): the tuple dim(V ∩ span(e_0..e_{w-1})) for w = 0..n."""
    F = PrimeField(q)
    out = []
    for V in enumerate_subspaces(F, n, k):
        out.append(tuple(k - rank_rows(F, [row[w:] for row in V], n - w) for w in range(n + 1)))
    return out


def nonincreasing(m, top):
    if m == 0:
        yield ()
        return
    for first in range(top, -1, -1):
        for rest in nonincreasing(m - 1, first):
            yield (first,) + rest


def check_genus_zero():
    dd = MultiDegree(2, 2)
    D = staircase(2, dd)
    rep = census(0, dd, 1, (5, 7, 11), 0, D, [0, 2])
    base_ok = rep.estimate.dim == 5 == rep.expected and rep.estimate.confidence is Confidence.CONSISTENT
    bad, flags = [], 0
    for q in (2, 3):
        for n in range(0, 6):
            for k in range(0, n + 1):
                profiles = subspace_profiles(n, k, q)
                for m in range(0, n + 2):
                    for dims in combinations(range(n, -1, -1), m):
                        for req in nonincreasing(m, k):
                            want = sum(all(p[w] >= e for w, e in zip(dims, req)) for p in profiles)
                            flags += 1
                            if schubert_count(n, k, list(dims), list(req), q) != want:
                                bad.append((n, k, dims, req, q))
    detail = f"g=0 counts {rep.counts} estimate {rep.estimate.dim} ({rep.estimate.confidence.value}); " \
             f"{flags} Schubert queries, mismatches {len(bad)}"
    return base_ok and not bad, detail


def test_criterion_2_genus_zero():
    t = time.perf_counter()
    ok, detail = check_genus_zero()
    assert report(2, ok, time.perf_counter() - t, 30.0, detail)


# -- 3


def desk_scale_cases():
    for g in (1, 2, 3):
        for d in range(0, 6):
            for d1 in range(-1, d + 2):
                dd = MultiDegree(d1, d - d1)
                if dd.d2 < -1 or not is_balanced(dd, g):
                    continue
                for r in (0, 1, 2):
                    yield g, dd, r, None, None
                    if expected_dim(g, r, d) < 0:
                        continue
                    D = staircase(r + 1, dd)
                    a = list(range(r)) + [r + 1]
                    # hypothesis of the dimension statement: small degrees or dd-bounded ramification
                    small = dd.d1 <= g and dd.d2 <= g
                    if is_admissible(a, D) and (small or is_d_bounded(a, D, dd)):
                        yield g, dd, r, D, a


def check_desk_scale():
    violations, n, discards = [], 0, 0
    for g, dd, r, D, a in desk_scale_cases():
        run = census_seeds(g, dd, r, PRIMES, SEEDS, D, a)
        n += 1
        discards += len(run.discards)
        if not run.verified:
            counts = [rep.counts for rep in run.reports if not rep.verified]
            violations.append(f"g={g} dd={dd} r={r} a={a} aborted={run.aborted} discards={run.discards} {counts}")
    detail = f"{n} queries, {discards} re-drawn seeds, {len(violations)} violations"
    if violations:
        detail += ": " + "; ".join(violations)
    return not violations, detail


@pytest.mark.slow
def test_criterion_3_desk_scale_dimension():
    t = time.perf_counter()
    ok, detail = check_desk_scale()
    assert report(3, ok, time.perf_counter() - t, 600.0, detail)


# -- 4


def check_degree_bounds():
    exceptions, n = [], 0
    for g in range(0, 4):
        for r in (0, 1, 2):
            for d in range(-2, g + r):
                for d1 in range(-4, d + 5):
                    dd = MultiDegree(d1, d - d1)
                    try:
                        bound = degree_bounds(g, r, dd)
                    except ValueError:
                        continue
                    if not bound.forces_empty:
                        continue
                    for seed in SEEDS:
                        n += 1
                        counts = census(g, dd, r, PRIMES, seed).counts
                        if any(counts.values()):
                            exceptions.append((g, r, str(dd), seed, counts))
    return not exceptions, f"{n} (multidegree, seed) queries forced empty, exceptions {exceptions}"


def test_criterion_4_degree_bounds():
    t = time.perf_counter()
    ok, detail = check_degree_bounds()
    assert report(4, ok, time.perf_counter() - t, None, detail)


# -- 5


def check_first_counterexample():
    dd = MultiDegree(3, -2)
    counts = {}
    for q in (5, 7, 11):
        counts[q] = count_points(random_curve(2, q, 0), dd, 0)
    exact = all(n == (q - 1) ** 2 for q, n in counts.items())
    rep = counterexample_report("ex1", 2, dd, 0, (5, 7, 11))
    code, _ = _cli("counterexample", "ex1", "--g", "2", "--dd", "3,-2", "--primes", "5,7,11")
    ok = exact and rep.estimate.dim == 2 > rep.expected == 1 and code == 0
    return ok, f"counts {counts}, dimension {rep.estimate.dim} vs rho {rep.expected}, exit {code}"


def test_criterion_5_first_counterexample():
    t = time.perf_counter()
    ok, detail = check_first_counterexample()
    assert report(5, ok, time.perf_counter() - t, 5.0, detail)


# -- 6


def check_second_counterexample():
    dd = MultiDegree(3, 0)
    rows, ok = [], True
    for seed in SEEDS:
        rep = counterexample_report("ex2", 2, dd, 0, PRIMES, seed)
        ok &= rep.notes["nonempty_everywhere"] and rep.expected < 0
        rows.append(rep.counts)
    return ok, f"D={rep.query['D']} a={rep.query['a']} expected {rep.expected}, counts {rows}"


def test_criterion_6_second_counterexample():
    t = time.perf_counter()
    ok, detail = check_second_counterexample()
    assert report(6, ok, time.perf_counter() - t, 10.0, detail)


# -- 7


def check_cross_model():
    failures, configs = 0, 0
    for g in (0, 1, 2):
        for dd in ("1,1", "2,1", "2,2"):
            doc = _cli_json("crosscheck", "--g", str(g), "--dd", dd, "--primes", "7,11",
                            "--planes", "200", "--draws", "100")
            failures += doc["failures"]
            configs += len(doc["results"])
            assert all(x["planes"] == 200 and x["dictionary_draws"] == 100 for x in doc["results"])
    return failures == 0, f"{configs} (g, dd, q, r) configurations, {failures} failures"


def test_criterion_7_cross_model():
    t = time.perf_counter()
    ok, detail = check_cross_model()
    assert report(7, ok, time.perf_counter() - t, 120.0, detail)


# -- 8


def random_instance(rng):
    g = rng.randint(0, 2)
    p = rng.choice((7, 11))
    X = random_curve(g, p, rng.randrange(10 ** 6))
    dd = MultiDegree(rng.randint(0, 4), rng.randint(-1, 4))
    S = section_space(X, line_bundle(X.field, dd, [rng.randrange(1, p) for _ in range(g + 1)]))
    return X, S


def check_structure():
    rng = random.Random("acceptance/8")
    bad_adm = bad_memb = bad_norm = 0
    truth = Counter()
    n_adm = n_memb = n_norm = 0
    while min(n_adm, n_memb, n_norm) < 100:
        X, S = random_instance(rng)
        if S.dim == 0:
            continue
        r = rng.randint(0, S.dim - 1)
        V = random_subspace_of(X.field, S.basis, r + 1, rng)
        D = random_divisor_sequence(rng, rng.randint(1, 5), 3)
        seq = multi_vanishing_sequence(S, D, V)
        n_adm += 1
        bad_adm += not is_admissible(seq, D)
        # the actual sequence, with one entry raised half the time, so both answers occur
        degs = [s.deg for s in D]
        a = list(seq)
        if rng.random() < 0.5:
            j = rng.randrange(len(a))
            higher = [x for x in degs if x > a[j]]
            if higher:
                a[j] = higher[0]
                a.sort()
        if not is_admissible(a, D):
            continue
        meets = meets_ramification(S, D, a, V)
        dominates = all(x >= y for x, y in zip(seq, a))
        direct = all(vanishing_subspace(S, D[[s.deg for s in D].index(x)], V).dim >= r + 1 - j
                     for j, x in enumerate(a))
        n_memb += 1
        truth[meets] += 1
        bad_memb += not (meets == dominates == direct)
        D2, a2 = normalize_sequence(D, a)
        n_norm += 1
        bad_norm += meets != meets_ramification(S, D2, a2, V)
    bad_strata, n_strata = check_strata_double_count()
    ok = not (bad_adm or bad_memb or bad_norm or bad_strata) and truth[True] and truth[False]
    detail = (f"admissible {n_adm - bad_adm}/{n_adm}; membership {n_memb - bad_memb}/{n_memb} "
              f"(true {truth[True]}, false {truth[False]}); normalization {n_norm - bad_norm}/{n_norm}; "
              f"strata {n_strata - bad_strata}/{n_strata}")
    return ok, detail


STRATA_QUERIES = [
    # (g, d, y, P, r)
    (2, 4, 0, 1, 1), (1, 3, 0, 1, 1), (1, 2, 0, 2, 0), (2, 3, 1, 1, 0), (2, 2, 0, 1, 0), (3, 4, 0, 2, 1),
]


def check_strata_double_count():
    """Each stratum count equals the count of line bundles on the partial normalization."""
    bad = n = 0
    for g, d, y, P, r in STRATA_QUERIES:
        for q in (7, 11):
            X = random_curve(g, q, 0)
            E = make_polarization(d, g, y)
            rows = strata_counts(X, d, E, P, r)
            assert [(J, dd) for J, dd, _ in rows] == list(quasistable_strata(d, g, E, P))
            for J, dd, count in rows:
                n += 1
                bad += count != count_points(partial_normalization(X, J), dd, r)
    return bad, n


def test_criterion_8_structural_invariants():
    t = time.perf_counter()
    ok, detail = check_structure()
    assert report(8, ok, time.perf_counter() - t, None, detail)


if __name__ == "__main__":
    checks = [(1, check_rho, 1.0), (2, check_genus_zero, 30.0), (3, check_desk_scale, 600.0),
              (4, check_degree_bounds, None), (5, check_first_counterexample, 5.0),
              (6, check_second_counterexample, 10.0), (7, check_cross_model, 120.0),
              (8, check_structure, None)]
    results = []
    for n, fn, limit in checks:
        t = time.perf_counter()
        ok, detail = fn()
        results.append(report(n, ok, time.perf_counter() - t, limit, detail))
    sys.exit(0 if all(results) else 1)
