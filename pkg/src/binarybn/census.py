"""Point counts of Brill-Noether loci on binary curves over finite fields.

For a fixed curve, multidegree and divisor sequence we walk the whole
gluing torus.  Each gluing datum gives a section space H^0 and the
dimensions of H^0(-D_l) along the divisor sequence; that pair is its
:class:`StratumProfile`.  The number of (r+1)-planes V in H^0 meeting the
ramification conditions depends only on the profile (it is a Schubert
variety count), so a locus count is a weighted sum over the profile
histogram.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

from . import __version__
from .curvemodel import (
    BinaryCurve,
    MultiDegree,
    Polarization,
    _check_node_subset,
    quasistable_strata,
    random_curve,
)
from .exactalg import PrimeField, gaussian_binomial, kernel_rows, mat_mul_rows, rank_rows
from .ramification import (
    DivisorStep,
    admissible_indices,
    divisor_sequence,
    expected_dim,
    is_admissible,
    rho_terms,
)
from .sections import block_sizes, sequence_from_dims, shift_rows

REPORT_SCHEMA = "binarybn.census-report/1"
DEFAULT_BUDGET = 10 ** 7
BAND = (1 / 8, 8)


class BudgetExceeded(RuntimeError):
    pass


class Mode(enum.Enum):
    AT_LEAST = "at_least"  # G
    EXACT_H0 = "exact_h0"  # G°: h0 = r+1
    EXACT_SEQUENCE = "exact_sequence"  # G°°: h0 = r+1, sequence exactly a
    BOUNDARY = "boundary"  # G \ G°


class Confidence(enum.Enum):
    EXACT = "exact"
    CONSISTENT = "consistent"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True, order=True)
class StratumProfile:
    h0: int
    flag_dims: tuple


# ---------------------------------------------------------------------------
# the gluing torus


def torus_size(X: BinaryCurve, J=()) -> int:
    q = X.field.order
    return (q - 1) ** (X.genus - len(frozenset(J)))


def _glued_nodes(X: BinaryCurve, J) -> list[int]:
    J = frozenset(J)
    return [j for j in X.node_ids if j not in J]


class _TorusWalker:
    """Precomputed data for computing profiles at many gluing values."""

    def __init__(self, X: BinaryCurve, J, dd: MultiDegree, D: Sequence[DivisorStep]):
        F = X.field
        self.F = F
        self.p = F.p
        self.glued = _glued_nodes(X, J)
        n1, n2 = block_sizes(dd)
        self.n1, self.n = n1, n1 + n2
        self.D = D
        top = D[-1]

        def powers(t, m):
            return [pow(t, i, F.p) for i in range(m)]

        self.ev1 = [powers(X.nodes[j][0], n1) for j in self.glued]
        self.ev2 = [powers(X.nodes[j][1], n2) for j in self.glued]
        self.s1 = shift_rows(F, n1, X.marked[0], top.a1)
        self.s2 = shift_rows(F, n2, X.marked[1], top.a2)

    def profile(self, lams: Sequence[int]) -> StratumProfile:
        p = self.p
        rows = [e1 + [(-lam * x) % p for x in e2] for e1, e2, lam in zip(self.ev1, self.ev2, lams)]
        basis = kernel_rows(self.F, rows, self.n)
        h = len(basis)
        if h == 0:
            return StratumProfile(0, (0,) * len(self.D))
        n1 = self.n1
        r1 = mat_mul_rows(self.F, self.s1, [v[:n1] for v in basis])
        r2 = mat_mul_rows(self.F, self.s2, [v[n1:] for v in basis])
        dims = tuple(h - rank_rows(self.F, r1[: s.a1] + r2[: s.a2], h) for s in self.D)
        return StratumProfile(h, dims)


def _chunk_histogram(args) -> Counter:
    X, J, dd, D, first = args
    walker = _TorusWalker(X, J, dd, D)
    units = range(1, X.field.p)
    hist: Counter = Counter()
    rest = len(walker.glued) - 2
    if first is None:  # a single glued node: the torus is a point
        hist[walker.profile([1])] += 1
        return hist
    for tail in product(units, repeat=rest):
        hist[walker.profile((1, first) + tail)] += 1
    return hist


def torus_histogram(X: BinaryCurve, J, dd: MultiDegree, D_seq, budget: int = DEFAULT_BUDGET,
                    workers: int = 1) -> dict[StratumProfile, int]:
    """Exact histogram of profiles over all normalized gluing data.

    Work is split into chunks by the second gluing value; chunks are merged
    in index order so the result does not depend on ``workers``.
    """
    if not isinstance(X.field, PrimeField):
        raise ValueError("torus enumeration needs a finite field")
    J = frozenset(J)
    _check_node_subset(X, J)
    D = divisor_sequence(D_seq)
    size = torus_size(X, J)
    if size > budget:
        raise BudgetExceeded(f"torus has {size} points, budget is {budget}")
    if len(_glued_nodes(X, J)) == 1:
        tasks = [(X, J, dd, D, None)]
    else:
        tasks = [(X, J, dd, D, u) for u in range(1, X.field.p)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_histogram, tasks))
    else:
        parts = [_chunk_histogram(t) for t in tasks]
    total: Counter = Counter()
    for part in parts:
        total.update(part)
    return dict(sorted(total.items()))


# ---------------------------------------------------------------------------
# Schubert counts


def _check_flag(n, k, flag_dims, required):
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if len(flag_dims) != len(required):
        raise ValueError("flag_dims and required differ in length")
    if any(w < 0 or w > n for w in flag_dims):
        raise ValueError("flag dimension outside [0, n]")
    if any(a <= b for a, b in zip(flag_dims, flag_dims[1:])):
        raise ValueError("flag_dims must be strictly decreasing")
    if any(a < b for a, b in zip(required, required[1:])):
        raise ValueError("required must be nonincreasing")


def schubert_count(n: int, k: int, flag_dims: Sequence[int], required: Sequence[int], q: int) -> int:
    """#{V in Gr(k, n)(F_q) : dim(V ∩ W_j) >= required_j} for a flag W_1 > W_2 > ...

    Sums over exact intersection profiles e_j = dim(V ∩ W_j).  Going from
    W_{j+1} out to W_j, the number of extensions of a fixed V ∩ W_{j+1}
    (dim e) to V ∩ W_j (dim e') is q^((e'-e)(w_{j+1}-e)) [w_j - w_{j+1}, e'-e]_q.
    """
    _check_flag(n, k, flag_dims, required)
    w = [n] + list(flag_dims)
    req = [k] + list(required)
    m = len(w) - 1
    # table[e] = number of ways to choose V ∩ W_j of dim e meeting constraints below j
    table = {e: gaussian_binomial(w[m], e, q) for e in range(max(req[m], 0), min(w[m], k) + 1)}
    for j in range(m - 1, -1, -1):
        gap = w[j] - w[j + 1]
        nxt: dict[int, int] = {}
        hi = min(w[j], k)
        for e, ways in table.items():
            for e2 in range(max(e, req[j]), min(e + gap, hi) + 1):
                c = q ** ((e2 - e) * (w[j + 1] - e)) * gaussian_binomial(gap, e2 - e, q)
                nxt[e2] = nxt.get(e2, 0) + ways * c
        table = nxt
    return table.get(k, 0)


def enumerate_subspaces(field: PrimeField, n: int, k: int):
    """Yield every k-dim subspace of F_q^n once, as its RREF basis."""
    q = field.p
    for pivots in combinations(range(n), k):
        free = [(i, c) for i, pc in enumerate(pivots) for c in range(pc + 1, n) if c not in pivots]
        for vals in product(range(q), repeat=len(free)):
            rows = [[0] * n for _ in range(k)]
            for i, pc in enumerate(pivots):
                rows[i][pc] = 1
            for (i, c), v in zip(free, vals):
                rows[i][c] = v
            yield tuple(tuple(r) for r in rows)


def schubert_count_bruteforce(n: int, k: int, flag_dims: Sequence[int], required: Sequence[int], q: int) -> int:
    """Oracle for :func:`schubert_count`: enumerate Gr(k, n)(F_q) directly.

    Uses the coordinate flag W = span(e_0, ..., e_{w-1}); dim(V ∩ W) is k
    minus the rank of V's coordinates outside W.
    """
    _check_flag(n, k, flag_dims, required)
    F = PrimeField(q)
    count = 0
    for V in enumerate_subspaces(F, n, k):
        ok = True
        for w, need in zip(flag_dims, required):
            outside = [row[w:] for row in V]
            if k - rank_rows(F, outside, n - w) < need:
                ok = False
                break
        count += ok
    return count


# ---------------------------------------------------------------------------
# locus counts


def _conditions(profile: StratumProfile, r: int, ls: Sequence[int]):
    """Collapse the ramification conditions to a strictly decreasing flag."""
    best: dict[int, int] = {}
    for j, l in enumerate(ls):
        w = profile.flag_dims[l]
        need = r + 1 - j
        if w >= profile.h0 or need <= 0:
            continue
        best[w] = max(best.get(w, 0), need)
    dims = sorted(best, reverse=True)
    return dims, [best[w] for w in dims]


def profile_count(profile: StratumProfile, r: int, D: Sequence[DivisorStep], a: Sequence[int],
                  mode: Mode, q: int, bruteforce: bool = False) -> int:
    """Number of admissible V for one gluing datum with this profile.

    ``bruteforce`` swaps the Schubert DP for direct enumeration (tiny cases only).
    """
    k = r + 1
    if profile.h0 < k:
        return 0
    if mode in (Mode.EXACT_H0, Mode.EXACT_SEQUENCE) and profile.h0 != k:
        return 0
    if mode is Mode.BOUNDARY and profile.h0 == k:
        return 0
    if mode is Mode.EXACT_SEQUENCE:
        return int(sequence_from_dims(D, profile.flag_dims) == list(a))
    ls = admissible_indices(a, D)
    dims, need = _conditions(profile, r, ls)
    counter = schubert_count_bruteforce if bruteforce else schubert_count
    return counter(profile.h0, k, dims, need, q)


def _query(r: int, D_seq, a_seq):
    if a_seq is None:
        a_seq = [0] * (r + 1)
        D_seq = [(0, 0)] if D_seq is None else D_seq
    D = divisor_sequence(D_seq)
    a = list(a_seq)
    if len(a) != r + 1:
        raise ValueError(f"ramification sequence has length {len(a)}, expected {r + 1}")
    if not is_admissible(a, D):
        raise ValueError(f"{a} is not admissible along {[str(s) for s in D]}")
    return D, a


def count_from_histogram(hist: dict, r: int, D, a, mode: Mode, q: int) -> int:
    return sum(n * profile_count(prof, r, D, a, mode, q) for prof, n in hist.items())


def count_points(X: BinaryCurve, dd: MultiDegree, r: int, D_seq=None, a_seq=None,
                 mode: Mode = Mode.AT_LEAST, J=(), budget: int = DEFAULT_BUDGET, workers: int = 1) -> int:
    """#G^r_dd(X_J; D, a)(F_q) in the requested mode.

    Without a ramification sequence the locus is the full G^r_dd.
    """
    D, a = _query(r, D_seq, a_seq)
    hist = torus_histogram(X, J, dd, D, budget, workers)
    return count_from_histogram(hist, r, D, a, Mode(mode), X.field.p)


def strata_counts(X: BinaryCurve, d: int, E: Polarization, P_component: int, r: int, D_seq=None,
                  a_seq=None, mode: Mode = Mode.AT_LEAST, budget: int = DEFAULT_BUDGET, workers: int = 1):
    """Per-stratum counts ``[(J, dd_J, N)]`` of the compactified locus."""
    out = []
    for J, dd in quasistable_strata(d, X.genus, E, P_component):
        out.append((J, dd, count_points(X, dd, r, D_seq, a_seq, mode, J, budget, workers)))
    return out


def count_points_compactified(X: BinaryCurve, d: int, E: Polarization, P_component: int, r: int,
                              D_seq=None, a_seq=None, mode: Mode = Mode.AT_LEAST,
                              budget: int = DEFAULT_BUDGET, workers: int = 1) -> int:
    return sum(n for _, _, n in strata_counts(X, d, E, P_component, r, D_seq, a_seq, mode, budget, workers))


# ---------------------------------------------------------------------------
# dimension estimates


@dataclass(frozen=True)
class DimensionEstimate:
    dim: int | None  # None marks an empty locus
    confidence: Confidence

    @property
    def empty(self) -> bool:
        return self.dim is None


def estimate_dimension(counts: dict[int, int]) -> DimensionEstimate:
    """Dimension from point-count growth N(q) ~ c q^dim."""
    if counts and all(n == 0 for n in counts.values()):
        return DimensionEstimate(None, Confidence.EXACT)
    if len(counts) < 2:
        raise ValueError("need counts for at least two primes")
    positive = {q: n for q, n in counts.items() if n > 0}
    q_max = max(positive)
    dim = round(math.log(positive[q_max]) / math.log(q_max))
    if len(positive) < len(counts):
        return DimensionEstimate(dim, Confidence.INCONSISTENT)
    for q, n in positive.items():
        if round(math.log(n) / math.log(q)) != dim:
            return DimensionEstimate(dim, Confidence.INCONSISTENT)
        ratio = n / q ** dim
        if not BAND[0] <= ratio <= BAND[1]:
            return DimensionEstimate(dim, Confidence.INCONSISTENT)
    return DimensionEstimate(dim, Confidence.CONSISTENT)


# ---------------------------------------------------------------------------
# reports


@dataclass
class CensusReport:
    query: dict
    counts: dict  # prime -> N(q)
    histograms: dict  # prime -> list of (h0, flag_dims, torus count, V count)
    estimate: DimensionEstimate
    expected: int
    notes: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        """Empty, or a consistent estimate equal to the expected dimension."""
        if self.estimate.confidence is Confidence.EXACT:
            return True
        return self.estimate.confidence is Confidence.CONSISTENT and self.estimate.dim == self.expected

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "version": __version__,
            "query": self.query,
            "counts": {str(q): str(n) for q, n in sorted(self.counts.items())},
            "histograms": {
                str(q): [
                    {"h0": h, "flag_dims": list(f), "torus_points": str(t), "series_per_point": str(v)}
                    for h, f, t, v in rows
                ]
                for q, rows in sorted(self.histograms.items())
            },
            "estimate": {"dim": self.estimate.dim, "confidence": self.estimate.confidence.value},
            "expected": self.expected,
            "verified": self.verified,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["prime", "count", "log_q_count"])
        for q, n in sorted(self.counts.items()):
            w.writerow([q, n, f"{math.log(n) / math.log(q):.4f}" if n > 0 else ""])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"query     {json.dumps(self.query, sort_keys=True)}"]
        lines.append(f"{'prime':>8} {'N(q)':>24} {'log_q N':>9}")
        for q, n in sorted(self.counts.items()):
            lg = f"{math.log(n) / math.log(q):9.3f}" if n > 0 else f"{'-':>9}"
            lines.append(f"{q:>8} {n:>24} {lg}")
        est = "empty" if self.estimate.empty else str(self.estimate.dim)
        lines.append(f"estimate  {est} ({self.estimate.confidence.value})")
        lines.append(f"expected  {self.expected}")
        for k, v in sorted(self.notes.items()):
            lines.append(f"{k:<9} {v}")
        lines.append(f"verified  {self.verified}")
        return "\n".join(lines) + "\n"


def census(g: int, dd: MultiDegree, r: int, primes: Sequence[int], seed: int, D_seq=None, a_seq=None,
           mode: Mode = Mode.AT_LEAST, budget: int = DEFAULT_BUDGET, workers: int = 1,
           curves: dict | None = None) -> CensusReport:
    """Count one locus over several primes, one random curve per prime."""
    D, a = _query(r, D_seq, a_seq)
    mode = Mode(mode)
    counts, hists = {}, {}
    for p in primes:
        X = curves[p] if curves else random_curve(g, p, seed)
        hist = torus_histogram(X, (), dd, D, budget, workers)
        rows = []
        total = 0
        for prof, n in hist.items():
            v = profile_count(prof, r, D, a, mode, p)
            rows.append((prof.h0, prof.flag_dims, n, v))
            total += n * v
        counts[p], hists[p] = total, rows
    ramified = a_seq is not None
    query = {
        "g": g,
        "dd": [dd.d1, dd.d2],
        "r": r,
        "primes": list(primes),
        "seed": seed,
        "mode": mode.value,
        "D": [[s.a1, s.a2] for s in D] if ramified else None,
        "a": list(a) if ramified else None,
    }
    expected = expected_dim(g, r, dd.d, a if ramified else (), D if ramified else None)
    return CensusReport(query, counts, hists, estimate_dimension(counts), expected)


@dataclass
class SeedRun:
    """Outcome of a census over a list of seeds with the re-draw rule."""

    reports: list
    discards: list
    aborted: bool

    @property
    def verified(self) -> bool:
        return not self.aborted and all(rep.verified for rep in self.reports)


MAX_CONSECUTIVE_DISCARDS = 3


def redraw_seeds(run, seeds: Sequence[int]) -> SeedRun:
    """Call ``run(seed)`` for every seed, re-drawing Inconsistent curves.

    Replacement seeds count upward from ``max(seeds) + 1``.  Three
    consecutive discards for one requested seed abort the run.
    """
    spare = max(seeds) + 1
    reports, discards = [], []
    for s in seeds:
        cur = s
        streak = 0
        while True:
            rep = run(cur)
            if rep.estimate.confidence is not Confidence.INCONSISTENT:
                reports.append(rep)
                break
            discards.append(cur)
            streak += 1
            if streak >= MAX_CONSECUTIVE_DISCARDS:
                return SeedRun(reports, discards, True)
            cur, spare = spare, spare + 1
    return SeedRun(reports, discards, False)


def census_seeds(g: int, dd: MultiDegree, r: int, primes: Sequence[int], seeds: Sequence[int],
                 D_seq=None, a_seq=None, mode: Mode = Mode.AT_LEAST, budget: int = DEFAULT_BUDGET,
                 workers: int = 1) -> SeedRun:
    """:func:`census` over several seeds with the re-draw rule."""
    return redraw_seeds(lambda s: census(g, dd, r, primes, s, D_seq, a_seq, mode, budget, workers), seeds)


# ---------------------------------------------------------------------------
# counterexamples


def counterexample_report(which: str, g: int, dd: MultiDegree, r: int, primes: Sequence[int],
                          seed: int = 0, budget: int = DEFAULT_BUDGET) -> CensusReport:
    """Reproduce one of the two examples where the dimension count fails.

    ``"ex1"``: d1 >= g, d2 <= -2, d >= g+r-1.  Every line bundle has
    d1 - g sections, so the locus has dimension g + (r+1)(d1-g-r-1) > rho.

    ``"ex2"``: d1 >= g+1, d >= g+r, ramification a^1 = 0, a^2_j = j for
    j < r and a^2_r = rho + r + 1.  The sequence is not dd-bounded and the
    expected dimension is negative, yet the locus is nonempty.
    """
    d1, d2 = dd.d1, dd.d2
    d = dd.d
    rho = rho_terms(g, r, d)[0]
    if which == "ex1":
        if not (d1 >= g and d2 <= -2 and d >= g + r - 1):
            raise ValueError("need d1 >= g, d2 <= -2 and d >= g+r-1")
        rep = census(g, dd, r, primes, seed, budget=budget)
        predicted = g + (r + 1) * (d1 - g - r - 1)
        rep.notes.update({
            "predicted": predicted,
            "rho": rho,
            "exceeds_rho": (not rep.estimate.empty) and rep.estimate.dim > rho,
            "prediction_matches": rep.estimate.dim == predicted,
        })
        return rep
    if which == "ex2":
        if not (d1 >= g + 1 and d >= g + r):
            raise ValueError("need d1 >= g+1 and d >= g+r")
        D = [(0, j) for j in range(r)] + [(0, rho + r + 1)]
        a = [s2 for _, s2 in D]
        rep = census(g, dd, r, primes, seed, D, a, budget=budget)
        rep.notes.update({
            "rho": rho,
            "expected_ramified": rep.expected,
            "nonempty_everywhere": all(n > 0 for n in rep.counts.values()),
        })
        return rep
    raise ValueError(f"unknown counterexample {which!r}")


def expected_sequences(r: int, D_seq, a_seq) -> list[list[int]]:
    """All admissible sequences along D that dominate a pointwise."""
    D = divisor_sequence(D_seq)
    degs = [s.deg for s in D]
    out = []

    def rec(prefix):
        j = len(prefix)
        if j == r + 1:
            if is_admissible(prefix, D):
                out.append(list(prefix))
            return
        for v in degs:
            if v >= a_seq[j] and (not prefix or v >= prefix[-1]):
                rec(prefix + [v])

    rec([])
    return out


def census_compactified(g: int, d: int, E: Polarization, P_component: int, r: int, primes: Sequence[int],
                        seed: int, D_seq=None, a_seq=None, mode: Mode = Mode.AT_LEAST,
                        budget: int = DEFAULT_BUDGET, workers: int = 1) -> CensusReport:
    """Census of the compactified locus: a sum over quasistable strata."""
    D, a = _query(r, D_seq, a_seq)
    mode = Mode(mode)
    counts, per_stratum = {}, {}
    for p in primes:
        X = random_curve(g, p, seed)
        rows = strata_counts(X, d, E, P_component, r, D, a, mode, budget, workers)
        counts[p] = sum(n for _, _, n in rows)
        per_stratum[str(p)] = [{"J": list(J), "dd": [dd.d1, dd.d2], "count": str(n)} for J, dd, n in rows]
    ramified = a_seq is not None
    query = {
        "g": g,
        "d": d,
        "polarization": [str(E.e1), str(E.e2)],
        "P": P_component,
        "r": r,
        "primes": list(primes),
        "seed": seed,
        "mode": mode.value,
        "D": [[s.a1, s.a2] for s in D] if ramified else None,
        "a": list(a) if ramified else None,
    }
    expected = expected_dim(g, r, d, a if ramified else (), D if ramified else None)
    return CensusReport(query, counts, {}, estimate_dimension(counts), expected, {"strata": per_stratum})
