"""Binary curves and their discrete data.

A binary curve of genus g is two projective lines Z_1, Z_2 glued along
g+1 pairs of points.  Every point is stored by its affine coordinate;
the random generator never produces the point at infinity.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable

from .exactalg import Field, PrimeField, QQ

CURVE_SCHEMA = "binarybn.curve/1"


@dataclass(frozen=True)
class MultiDegree:
    """Degrees (d1, d2) on (Z_1, Z_2).  Negative degrees are allowed."""

    d1: int
    d2: int

    @property
    def d(self) -> int:
        return self.d1 + self.d2

    def __iter__(self):
        return iter((self.d1, self.d2))

    def __str__(self) -> str:
        return f"({self.d1},{self.d2})"


@dataclass(frozen=True)
class BinaryCurve:
    field: Field
    nodes: tuple  # ((q1_0, q2_0), ..., (q1_g, q2_g))
    marked: tuple  # (P_1, P_2)
    seed: int | None = None

    def __post_init__(self):
        F = self.field
        nodes = tuple((F(a), F(b)) for a, b in self.nodes)
        marked = tuple(F(x) for x in self.marked)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "marked", marked)
        if not nodes:
            raise ValueError("a binary curve needs at least one node")
        if len(marked) != 2:
            raise ValueError("need exactly two marked points")
        for side in (0, 1):
            pts = [n[side] for n in nodes]
            if len(set(pts)) != len(pts):
                raise ValueError(f"node preimages on Z_{side + 1} are not distinct")
            if marked[side] in pts:
                raise ValueError(f"P_{side + 1} coincides with a node preimage")

    @property
    def genus(self) -> int:
        return len(self.nodes) - 1

    @property
    def node_ids(self) -> range:
        return range(len(self.nodes))

    def to_json(self) -> str:
        doc = {
            "schema": CURVE_SCHEMA,
            "genus": self.genus,
            "prime": getattr(self.field, "p", None),
            "nodes": [[_enc(a), _enc(b)] for a, b in self.nodes],
            "marked": [_enc(x) for x in self.marked],
            "seed": self.seed,
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BinaryCurve":
        doc = json.loads(text)
        if doc.get("schema") != CURVE_SCHEMA:
            raise ValueError(f"unsupported curve schema {doc.get('schema')!r}")
        field = PrimeField(doc["prime"]) if doc["prime"] is not None else QQ
        curve = cls(
            field,
            tuple((_dec(a), _dec(b)) for a, b in doc["nodes"]),
            tuple(_dec(x) for x in doc["marked"]),
            doc.get("seed"),
        )
        if curve.genus != doc["genus"]:
            raise ValueError("genus field disagrees with node list")
        return curve


def _enc(x):
    return x if isinstance(x, int) else str(x)


def _dec(x):
    return x if isinstance(x, int) else Fraction(x)


def random_curve(g: int, p: int, seed: int) -> BinaryCurve:
    """Random binary curve of genus g over F_p, deterministic in (g, p, seed).

    On each component the g+1 node preimages and the marked point are
    distinct affine coordinates.  Requires p > g + 2 so that at least one
    coordinate on each line stays unused.
    """
    if g < 0:
        raise ValueError("genus must be nonnegative")
    field = PrimeField(p)
    if p <= g + 2:
        raise ValueError(f"prime {p} too small for genus {g} (need p > {g + 2})")
    rng = random.Random(f"binary-curve/{g}/{p}/{seed}")
    sides = [rng.sample(range(p), g + 2) for _ in range(2)]
    nodes = tuple((sides[0][j], sides[1][j]) for j in range(g + 1))
    marked = (sides[0][g + 1], sides[1][g + 1])
    return BinaryCurve(field, nodes, marked, seed)


def partial_normalization(X: BinaryCurve, J: Iterable[int]) -> BinaryCurve:
    """Separate the nodes in J; the survivors keep their relative order."""
    J = frozenset(J)
    _check_node_subset(X, J)
    nodes = tuple(n for j, n in enumerate(X.nodes) if j not in J)
    return BinaryCurve(X.field, nodes, X.marked, X.seed)


def _check_node_subset(X: BinaryCurve, J: frozenset) -> None:
    bad = [j for j in J if j not in X.node_ids]
    if bad:
        raise ValueError(f"node indices out of range: {sorted(bad)}")
    if len(J) >= len(X.nodes):
        raise ValueError("normalizing every node disconnects the curve")


# ---------------------------------------------------------------------------
# polarizations and stability


@dataclass(frozen=True)
class Polarization:
    e1: Fraction
    e2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "e1", Fraction(self.e1))
        object.__setattr__(self, "e2", Fraction(self.e2))

    def total(self) -> Fraction:
        return self.e1 + self.e2

    def component(self, i: int) -> Fraction:
        return self.e1 if i == 1 else self.e2


def make_polarization(d: int, g: int, y: int) -> Polarization:
    """The polarization E_{d,g,y} of total degree d - g + 1."""
    if (d - g - y) % 2 == 0:
        return Polarization(Fraction(d - g + y, 2), Fraction(d - g - y, 2) + 1)
    return Polarization(Fraction(d - g + y + 1, 2), Fraction(d - g - y + 1, 2))


def is_balanced(dd: MultiDegree, g: int) -> bool:
    return abs(dd.d1 - dd.d2) <= g + 1


class Stability(enum.Enum):
    STABLE = "stable"
    QUASISTABLE_AT_P = "quasistable"
    SEMISTABLE = "semistable"
    UNSTABLE = "unstable"


def degree_stability(dd: MultiDegree, E: Polarization, P_component: int) -> Stability:
    """Strongest stability class of a multidegree against a polarization.

    Only the multidegree matters: chi of the restriction to Z_i is d_i + 1.
    """
    if P_component not in (1, 2):
        raise ValueError("P_component must be 1 or 2")
    chi = (dd.d1 + 1, dd.d2 + 1)
    e = (E.e1, E.e2)
    strict = [chi[i] > e[i] for i in range(2)]
    weak = [chi[i] >= e[i] for i in range(2)]
    if all(strict):
        return Stability.STABLE
    if not all(weak):
        return Stability.UNSTABLE
    if strict[P_component - 1]:
        return Stability.QUASISTABLE_AT_P
    return Stability.SEMISTABLE


def is_quasistable(dd: MultiDegree, E: Polarization, P_component: int) -> bool:
    return degree_stability(dd, E, P_component) in (Stability.STABLE, Stability.QUASISTABLE_AT_P)


def quasistable_strata(d: int, g: int, E: Polarization, P_component: int):
    """All (J, dd_J) with J a proper node subset, |dd_J| = d - |J|, dd_J P-quasistable.

    Ordered by |J|, then J lexicographically, then d1.
    """
    out = []
    lo = math.floor(E.e1) - 2
    for size in range(g + 1):
        for J in combinations(range(g + 1), size):
            dJ = d - size
            hi = dJ - math.floor(E.e2) + 2
            for d1 in range(lo, hi + 1):
                dd = MultiDegree(d1, dJ - d1)
                if is_quasistable(dd, E, P_component):
                    out.append((J, dd))
    return out
