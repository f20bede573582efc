"""Projective model: planes through chords of two rational normal curves.

Z_1 is embedded as t -> (1, t, ..., t^d1) in coordinates 0..d1 of
k^(d+2) and Z_2 as t -> (1, t, ..., t^d2) in coordinates d1+1..d+1.  A
coefficient vector c of a section pairs with a point x by <c, x>, so the
hyperplane {<c, .> = 0} contains the image of t on Z_i exactly when f_i(t)
vanishes.  A (d-r)-plane Lambda (a (d-r+1)-dim subspace) meeting every
chord in one interior point corresponds to a g^r_dd: the point on chord j
fixes the gluing value and the hyperplanes through Lambda form V.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .curvemodel import BinaryCurve, MultiDegree
from .exactalg import Subspace, intersect
from .sections import LinearSeries, SectionSpace, SheafRep, section_space, shift_rows, vanishing_subspace


class ChordMissed(ValueError):
    pass


class BadPlane(ValueError):
    pass


class AmbiguousChord(ValueError):
    pass


@dataclass(frozen=True)
class ChordConfig:
    curve: BinaryCurve
    dd: MultiDegree

    def __post_init__(self):
        if self.dd.d1 < 0 or self.dd.d2 < 0:
            raise ValueError("chord model needs d1, d2 >= 0")

    @property
    def field(self):
        return self.curve.field

    @property
    def ambient(self) -> int:
        return self.dd.d + 2

    def offset(self, component: int) -> int:
        return 0 if component == 1 else self.dd.d1 + 1

    def block_len(self, component: int) -> int:
        return (self.dd.d1 if component == 1 else self.dd.d2) + 1


@dataclass(frozen=True)
class PlaneModel:
    Lambda: Subspace

    @property
    def dim(self) -> int:
        return self.Lambda.dim


def _place(cfg: ChordConfig, component: int, vec) -> list:
    out = [0] * cfg.ambient
    off = cfg.offset(component)
    out[off: off + len(vec)] = vec
    return out


def embed_point(cfg: ChordConfig, component: int, t) -> tuple:
    F = cfg.field
    t = F(t)
    vec, x = [], 1
    for _ in range(cfg.block_len(component)):
        vec.append(x)
        x = F.reduce(x * t)
    return tuple(_place(cfg, component, vec))


def osculating_space(cfg: ChordConfig, component: int, P, order: int) -> Subspace:
    """The order-dimensional osculating space of Z_i at P.

    Spanned by the functionals that read off the coefficients of (t-P)^k,
    k < order; a hyperplane contains it iff its section vanishes to order
    >= ``order`` at P.
    """
    n = cfg.block_len(component)
    if not 0 <= order <= n:
        raise ValueError(f"order {order} outside [0, {n}]")
    rows = shift_rows(cfg.field, n, cfg.field(P), order)
    return Subspace.span(cfg.field, cfg.ambient, [_place(cfg, component, r) for r in rows])


def joined_flag(cfg: ChordConfig, b1: int, b2: int, points=None) -> Subspace:
    """Span of the order-b1 and order-b2 osculating spaces (default: at P_1, P_2)."""
    P1, P2 = cfg.curve.marked if points is None else points
    return osculating_space(cfg, 1, P1, b1) + osculating_space(cfg, 2, P2, b2)


def chord(cfg: ChordConfig, j: int) -> Subspace:
    if not 0 <= j < len(cfg.curve.nodes):
        raise ValueError(f"no node {j}")
    q1, q2 = cfg.curve.nodes[j]
    return Subspace.span(cfg.field, cfg.ambient, [embed_point(cfg, 1, q1), embed_point(cfg, 2, q2)])


def torus_act(cfg: ChordConfig, Lambda: Subspace, y) -> Subspace:
    """Scale the Z_1 block by y."""
    F = cfg.field
    y = F(y)
    n1 = cfg.block_len(1)
    vecs = [[F.reduce(x * y) if i < n1 else x for i, x in enumerate(v)] for v in Lambda.basis]
    return Subspace.span(F, cfg.ambient, vecs)


def _scale_block2(cfg: ChordConfig, V: Subspace, c) -> Subspace:
    F = cfg.field
    n1 = cfg.block_len(1)
    return Subspace.span(F, V.ambient_dim, [[x if i < n1 else F.reduce(x * c) for i, x in enumerate(v)]
                                            for v in V.basis])


def raw_gluing(cfg: ChordConfig, Lambda: Subspace) -> list:
    """Gluing value read off each chord, before torus normalization."""
    F = cfg.field
    if Lambda.ambient_dim != cfg.ambient:
        raise ValueError("plane lives in the wrong ambient space")
    off2 = cfg.offset(2)
    lams = []
    for j in range(len(cfg.curve.nodes)):
        meet = intersect(Lambda, chord(cfg, j))
        if meet.dim == 0:
            raise ChordMissed(f"plane misses chord {j}")
        if meet.dim == 2:
            raise AmbiguousChord(f"plane contains chord {j}")
        x = meet.basis[0]
        alpha, beta = x[0], x[off2]
        if alpha == 0 or beta == 0:
            raise BadPlane(f"plane meets chord {j} at an endpoint")
        lams.append(F.reduce(-beta * F.inv(alpha)))
    return lams


def plane_to_series(cfg: ChordConfig, Lambda) -> LinearSeries:
    Lambda = Lambda.Lambda if isinstance(Lambda, PlaneModel) else Lambda
    lams = raw_gluing(cfg, Lambda)
    sheaf = SheafRep.normalized(cfg.field, (), cfg.dd, dict(enumerate(lams)))
    # Normalizing lambda_0 to 1 rescales f_2 by the raw lambda_0.
    V = _scale_block2(cfg, Lambda.annihilator(), lams[0])
    return LinearSeries(sheaf, V)


def series_to_plane(cfg: ChordConfig, ls: LinearSeries) -> PlaneModel:
    if not ls.sheaf.is_line_bundle:
        raise ValueError("only line-bundle series have a plane model")
    if ls.sheaf.dd != cfg.dd or ls.V.ambient_dim != cfg.ambient:
        raise ValueError("series does not match the configuration")
    if ls.V.dim == 0:
        raise ValueError("degenerate series: V is zero")
    return PlaneModel(ls.V.annihilator())


def dictionary_check(cfg: ChordConfig, Lambda, b1: int, b2: int, lam: int) -> bool:
    """Compare both sides of the plane/series ramification dictionary.

    Left: the projective dimension of Lambda ∩ <b1 P_1, b2 P_2> is >= lam.
    Right: dim V(-b1 P_1 - b2 P_2) >= r + 1 - (b1 + b2 - 1) + lam.
    """
    Lambda = Lambda.Lambda if isinstance(Lambda, PlaneModel) else Lambda
    if not (0 <= b1 <= cfg.dd.d1 and 0 <= b2 <= cfg.dd.d2):
        raise ValueError("need 0 <= b_i <= d_i")
    ls = plane_to_series(cfg, Lambda)
    r = ls.r
    left = intersect(Lambda, joined_flag(cfg, b1, b2)).dim - 1 >= lam
    S = SectionSpace(cfg.curve, ls.sheaf, ls.V)
    right = vanishing_subspace(S, (b1, b2)).dim >= r + 1 - (b1 + b2 - 1) + lam
    return left == right


def random_series(cfg: ChordConfig, r: int, rng: random.Random, tries: int = 1000) -> LinearSeries:
    """A uniformly drawn gluing datum with h0 >= r+1 and a random V inside."""
    F = cfg.field
    units = list(range(1, F.p))
    for _ in range(tries):
        lams = [1] + [rng.choice(units) for _ in cfg.curve.nodes[1:]]
        sheaf = SheafRep.normalized(F, (), cfg.dd, dict(enumerate(lams)))
        S = section_space(cfg.curve, sheaf)
        if S.dim < r + 1:
            continue
        while True:
            mix = [[rng.randrange(F.p) for _ in range(S.dim)] for _ in range(r + 1)]
            vecs = [[F.reduce(sum(m * v[i] for m, v in zip(row, S.basis.basis))) for i in range(S.basis.ambient_dim)]
                    for row in mix]
            V = Subspace.span(F, S.basis.ambient_dim, vecs)
            if V.dim == r + 1:
                return LinearSeries(sheaf, V)
    raise RuntimeError(f"no gluing datum with h0 >= {r + 1} found in {tries} draws")


@dataclass
class CrosscheckResult:
    planes: int = 0
    skipped: int = 0
    roundtrip_failures: int = 0
    membership_failures: int = 0
    dictionary_draws: int = 0
    dictionary_failures: int = 0

    @property
    def failures(self) -> int:
        return self.roundtrip_failures + self.membership_failures + self.dictionary_failures

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "planes", "skipped", "roundtrip_failures", "membership_failures",
            "dictionary_draws", "dictionary_failures")} | {"failures": self.failures}


def crosscheck(cfg: ChordConfig, r: int, n_planes: int, n_dictionary: int, rng: random.Random) -> CrosscheckResult:
    """Round-trip random planes through the series model and test the dictionary.

    Planes are produced from random series and then moved by a random torus
    element, so plane_to_series sees non-normalized input.  Series with a
    base point at a node give a plane containing that chord and are
    skipped (counted in ``skipped``).
    """
    F = cfg.field
    res = CrosscheckResult()
    valid = []
    while res.planes < n_planes:
        ls = random_series(cfg, r, rng)
        y = rng.randrange(1, F.p)
        Lambda = torus_act(cfg, series_to_plane(cfg, ls).Lambda, y)
        try:
            back = plane_to_series(cfg, Lambda)
        except AmbiguousChord:
            res.skipped += 1
            continue
        res.planes += 1
        valid.append(Lambda)
        if back != ls:
            res.roundtrip_failures += 1
        raw0 = raw_gluing(cfg, Lambda)[0]
        if series_to_plane(cfg, back).Lambda != torus_act(cfg, Lambda, raw0):
            res.roundtrip_failures += 1
        if not back.V.issubspace(section_space(cfg.curve, back.sheaf).basis) or back.V.dim != r + 1:
            res.membership_failures += 1
    for _ in range(n_dictionary):
        Lambda = rng.choice(valid)
        b1 = rng.randint(0, cfg.dd.d1)
        b2 = rng.randint(0, cfg.dd.d2)
        lam = rng.randint(-1, cfg.dd.d - r)
        res.dictionary_draws += 1
        if not dictionary_check(cfg, Lambda, b1, b2, lam):
            res.dictionary_failures += 1
    return res
