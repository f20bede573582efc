"""Admissible sequences, sequence normalization, expected dimensions.

Divisor sequences are finite lists of steps ``a1*P_1 + a2*P_2``.  A step
list is valid when it starts at 0 (inserted if missing), its total degrees
strictly increase and both coordinates are nondecreasing.  When an
admissible sequence uses the last step of a finite list, no repetition
bound applies to it: the list can always be extended past that step.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from .curvemodel import MultiDegree, is_balanced


@dataclass(frozen=True)
class DivisorStep:
    """The effective divisor a1*P_1 + a2*P_2."""

    a1: int
    a2: int

    def __post_init__(self):
        if self.a1 < 0 or self.a2 < 0:
            raise ValueError(f"divisor step must be effective, got ({self.a1},{self.a2})")

    @property
    def deg(self) -> int:
        return self.a1 + self.a2

    def __le__(self, other: "DivisorStep") -> bool:
        return self.a1 <= other.a1 and self.a2 <= other.a2

    def __lt__(self, other: "DivisorStep") -> bool:
        return self <= other and self != other

    def __add__(self, other: "DivisorStep") -> "DivisorStep":
        return DivisorStep(self.a1 + other.a1, self.a2 + other.a2)

    def __sub__(self, other: "DivisorStep") -> "DivisorStep":
        return DivisorStep(self.a1 - other.a1, self.a2 - other.a2)

    def __str__(self) -> str:
        return f"({self.a1},{self.a2})"


ZERO = DivisorStep(0, 0)


def as_step(x) -> DivisorStep:
    if isinstance(x, DivisorStep):
        return x
    a1, a2 = x
    return DivisorStep(int(a1), int(a2))


def divisor_sequence(D_seq: Iterable) -> tuple[DivisorStep, ...]:
    """Validate a divisor sequence and prepend 0 when it is absent."""
    steps = [as_step(x) for x in D_seq]
    if not steps or steps[0] != ZERO:
        steps.insert(0, ZERO)
    for prev, cur in zip(steps, steps[1:]):
        if not (prev <= cur and prev.deg < cur.deg):
            raise ValueError(f"divisor sequence not increasing at {prev} -> {cur}")
    return tuple(steps)


def _degree_index(D: Sequence[DivisorStep]) -> dict[int, int]:
    return {s.deg: i for i, s in enumerate(D)}


def _room(D: Sequence[DivisorStep], l: int) -> float:
    return D[l + 1].deg - D[l].deg if l + 1 < len(D) else float("inf")


def is_admissible(a: Sequence[int], D_seq) -> bool:
    D = divisor_sequence(D_seq)
    a = list(a)
    if not a or any(x > y for x, y in zip(a, a[1:])):
        return False
    index = _degree_index(D)
    for value, reps in Counter(a).items():
        l = index.get(value)
        if l is None or reps > _room(D, l):
            return False
    return True


def _require_admissible(a, D_seq) -> tuple[DivisorStep, ...]:
    D = divisor_sequence(D_seq)
    if not is_admissible(a, D):
        raise ValueError(f"sequence {tuple(a)} is not admissible along {[str(s) for s in D]}")
    return D


def admissible_indices(a: Sequence[int], D_seq) -> list[int]:
    """The indices l_j with a_j = deg D_{l_j}."""
    D = _require_admissible(a, D_seq)
    index = _degree_index(D)
    return [index[x] for x in a]


def is_d_bounded(a: Sequence[int], D_seq, dd: MultiDegree) -> bool:
    D = _require_admissible(a, D_seq)
    top = D[admissible_indices(a, D)[-1]]
    cap = DivisorStep(max(dd.d1 + 1, 0), max(dd.d2 + 1, 0)) if dd.d1 >= -1 and dd.d2 >= -1 else None
    if cap is None or not top <= cap:
        return False
    return list(a).count(top.deg) <= dd.d1 + dd.d2 + 3 - top.deg


def normalize_sequence(D_seq, a: Sequence[int], dd: MultiDegree | None = None):
    """Reduce (D, a) to a strictly increasing pair of length r+1.

    Each run of c+1 equal values a_j = ... = a_{j+c} = deg D_l becomes
    deg D_l, deg D_l + 1, ..., deg D_l + c, realized by divisors inserted
    after D_l.  Inserted points go to P_1 first, then P_2, staying below
    D_{l+1}; when ``dd`` is given and a is dd-bounded the result also
    stays below (d1+1)P_1 + (d2+1)P_2.

    Returns ``(D'', a')`` with ``deg D''_j == a'_j``.
    """
    D = _require_admissible(a, D_seq)
    a = list(a)
    cap = None
    if dd is not None and is_d_bounded(a, D, dd):
        cap = DivisorStep(dd.d1 + 1, dd.d2 + 1)
    index = _degree_index(D)
    runs = sorted(Counter(a).items())
    D_out: list[DivisorStep] = []
    a_out: list[int] = []
    for k, (value, reps) in enumerate(runs):
        l = index[value]
        base = D[l]
        final = k == len(runs) - 1
        box = _insertion_box(D, l, base, cap if final else None, reps - 1)
        for u in range(reps):
            x = min(u, box[0])
            D_out.append(base + DivisorStep(x, u - x))
            a_out.append(value + u)
    return tuple(D_out), a_out


def _insertion_box(D, l, base, cap, need):
    big = 10 ** 9
    if l + 1 < len(D):
        room = D[l + 1] - base
        box = (room.a1, room.a2)
    else:
        box = (big, big)
    if cap is not None:
        capped = (min(box[0], cap.a1 - base.a1), min(box[1], cap.a2 - base.a2))
        # Fall back to the cap alone when the next step leaves too little room;
        # the next step is dropped from the reduced sequence anyway.
        box = capped if sum(capped) >= need else (cap.a1 - base.a1, cap.a2 - base.a2)
    return box


def rho_terms(g: int, r: int, d: int, a: Sequence[int] = ()) -> tuple[int, int, int]:
    """``(rho_{g,r,d}, sum(a_j - j), sum C(r_l, 2))``."""
    base = g - (r + 1) * (g - d + r)
    if not a:
        return base, 0, 0
    if len(a) != r + 1:
        raise ValueError(f"ramification sequence has length {len(a)}, expected r+1 = {r + 1}")
    excess = sum(x - j for j, x in enumerate(a))
    reps = sum(comb(c, 2) for c in Counter(a).values())
    return base, excess, reps


def expected_dim(g: int, r: int, d: int, a: Sequence[int] = (), D_seq=None) -> int:
    """Expected dimension of the ramified locus; may be negative."""
    if a and D_seq is not None:
        _require_admissible(a, D_seq)
    base, excess, reps = rho_terms(g, r, d, a)
    return base - (excess + reps)


class BoundKind(enum.Enum):
    MUST_BE_EMPTY_OR = "must_be_empty_or"
    NO_CONSTRAINT = "no_constraint"


@dataclass(frozen=True)
class DegreeBound:
    kind: BoundKind
    lower: int | None = None
    upper: int | None = None
    satisfied: bool = True

    @property
    def forces_empty(self) -> bool:
        return self.kind is BoundKind.MUST_BE_EMPTY_OR and not self.satisfied


def degree_bounds(g: int, r: int, dd: MultiDegree) -> DegreeBound:
    """Degree constraints on a nonempty G^r_dd when d < g + r."""
    d = dd.d
    if d >= g + r:
        return DegreeBound(BoundKind.NO_CONSTRAINT)
    hypotheses = (
        is_balanced(dd, g),
        dd.d1 >= -1 and dd.d2 >= -1,
        dd.d1 <= g + r and dd.d2 <= g + r,
    )
    if not any(hypotheses):
        raise ValueError(f"multidegree {dd} meets none of the degree-bound hypotheses for g={g}, r={r}")
    ok = all(r <= di <= d - r for di in dd)
    return DegreeBound(BoundKind.MUST_BE_EMPTY_OR, r, d - r, ok)


def staircase(n: int, dd: MultiDegree | None = None) -> tuple[DivisorStep, ...]:
    """Steps D_0 = 0, ..., D_n with deg D_j = j, alternating P_1 and P_2.

    With ``dd`` given, a side is skipped once it reaches d_i + 1; after both
    caps are reached the extra points go to P_1.
    """
    big = 10 ** 9
    caps = [big, big] if dd is None else [max(dd.d1 + 1, 0), max(dd.d2 + 1, 0)]
    cur = [0, 0]
    steps = [ZERO]
    for j in range(n):
        for side in ((0, 1) if j % 2 == 0 else (1, 0)):
            if cur[side] < caps[side]:
                cur[side] += 1
                break
        else:
            cur[0] += 1
        steps.append(DivisorStep(*cur))
    return tuple(steps)
