import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binarybn.chordspace import (
    AmbiguousChord,
    BadPlane,
    ChordConfig,
    ChordMissed,
    chord,
    crosscheck,
    dictionary_check,
    embed_point,
    joined_flag,
    osculating_space,
    plane_to_series,
    random_series,
    raw_gluing,
    series_to_plane,
    torus_act,
)
from binarybn.curvemodel import BinaryCurve, MultiDegree, random_curve
from binarybn.exactalg import PrimeField, Subspace, intersect
from binarybn.sections import LinearSeries, SheafRep, line_bundle, section_space


def config(g, dd, p=11, seed=0):
    return ChordConfig(random_curve(g, p, seed), MultiDegree(*dd))


def test_config_requires_nonnegative_degrees():
    with pytest.raises(ValueError):
        config(1, (2, -1))


def test_embed_point_examples():
    cfg = config(0, (2, 1), p=7)
    assert embed_point(cfg, 1, 0) == (1, 0, 0, 0, 0)
    assert embed_point(cfg, 2, 0) == (0, 0, 0, 1, 0)
    assert embed_point(cfg, 1, 3) == (1, 3, 2, 0, 0)


@pytest.mark.parametrize("dd", [(1, 1), (2, 1), (2, 2), (3, 2)])
def test_chords(dd):
    cfg = config(2, dd)
    F = cfg.field
    block1 = Subspace.span(F, cfg.ambient, [[int(i == k) for i in range(cfg.ambient)] for k in range(dd[0] + 1)])
    for j in range(3):
        c = chord(cfg, j)
        assert c.dim == 2
        assert intersect(c, block1) == Subspace.span(F, cfg.ambient, [embed_point(cfg, 1, cfg.curve.nodes[j][0])])
        assert c == joined_flag(cfg, 1, 1, cfg.curve.nodes[j])
        for k in range(j):
            assert intersect(c, chord(cfg, k)).dim == 0
    with pytest.raises(ValueError):
        chord(cfg, 3)


@pytest.mark.parametrize("comp", [1, 2])
def test_osculating_flag(comp):
    cfg = config(1, (3, 2))
    P = cfg.curve.marked[comp - 1]
    n = cfg.block_len(comp)
    spaces = [osculating_space(cfg, comp, P, a) for a in range(n + 1)]
    assert spaces[0].dim == 0
    assert [s.dim for s in spaces] == list(range(n + 1))
    assert all(a.issubspace(b) for a, b in zip(spaces, spaces[1:]))
    assert spaces[1] == Subspace.span(cfg.field, cfg.ambient, [embed_point(cfg, comp, P)])
    with pytest.raises(ValueError):
        osculating_space(cfg, comp, P, n + 1)


def test_joined_flag_extremes():
    cfg = config(1, (2, 1))
    assert joined_flag(cfg, 0, 0).dim == 0
    assert joined_flag(cfg, 3, 2) == Subspace.full(cfg.field, cfg.ambient)
    assert joined_flag(cfg, 2, 1).dim == 3


@pytest.mark.parametrize("p", [2, 3])
def test_osculating_spaces_in_small_characteristic(p):
    # derivative spans would collapse here; the annihilator definition does not
    F = PrimeField(p)
    X = BinaryCurve(F, ((0, 0),), (1, 1))
    cfg = ChordConfig(X, MultiDegree(4, 0))
    assert [osculating_space(cfg, 1, 1, a).dim for a in range(6)] == list(range(6))


def test_genus_zero_plane_round_trip():
    cfg = config(0, (1, 0), p=7)
    F = cfg.field
    (q1, q2), = cfg.curve.nodes
    e1, e2 = embed_point(cfg, 1, q1), embed_point(cfg, 2, q2)
    x = [F.reduce(a - b) for a, b in zip(e1, e2)]  # gluing value 1
    Lam = Subspace.span(F, 3, [x, [0, 1, 1]])
    if intersect(Lam, chord(cfg, 0)).dim != 1:
        Lam = Subspace.span(F, 3, [x, [0, 1, 2]])
    ls = plane_to_series(cfg, Lam)
    assert ls.V.dim == 1 and ls.sheaf.lam(0) == 1
    assert series_to_plane(cfg, ls).Lambda == Lam


def test_genus_zero_full_series_is_a_point_on_the_chord():
    cfg = config(0, (2, 1))
    S = section_space(cfg.curve, line_bundle(cfg.field, cfg.dd, [3]))
    plane = series_to_plane(cfg, LinearSeries(S.sheaf, S.basis))
    assert plane.dim == 1
    assert plane.Lambda.issubspace(chord(cfg, 0))


def test_bad_plane_from_non_locally_free_sheaf():
    # sections of a sheaf unglued at node 1 that vanish at its first preimage:
    # the plane contains that preimage but not its partner
    cfg = config(1, (2, 1))
    F = cfg.field
    S = section_space(cfg.curve, SheafRep.normalized(F, {1}, cfg.dd, {0: 1}))
    q1 = cfg.curve.nodes[1][0]
    V = intersect(S.basis, Subspace.span(F, cfg.ambient, [embed_point(cfg, 1, q1)]).annihilator())
    Lam = V.annihilator()
    assert Lam.contains(embed_point(cfg, 1, q1))
    assert not chord(cfg, 1).issubspace(Lam)
    with pytest.raises(BadPlane):
        plane_to_series(cfg, Lam)


def test_chord_missed_and_ambiguous():
    cfg = config(1, (2, 1))
    F = cfg.field
    rng = random.Random(0)
    while True:
        Lam = Subspace.span(F, cfg.ambient, [[rng.randrange(11) for _ in range(5)] for _ in range(3)])
        if Lam.dim == 3 and intersect(Lam, chord(cfg, 0)).dim == 0:
            break
    with pytest.raises(ChordMissed):
        plane_to_series(cfg, Lam)
    Lam = chord(cfg, 0) + chord(cfg, 1)
    with pytest.raises(AmbiguousChord):
        plane_to_series(cfg, Lam)


def test_base_point_at_node_contains_chord():
    cfg = config(1, (2, 2))
    F = cfg.field
    S = section_space(cfg.curve, line_bundle(F, cfg.dd, [1, 2]))
    q1 = cfg.curve.nodes[0][0]
    W = Subspace.span(F, cfg.ambient, [embed_point(cfg, 1, q1)]).annihilator()
    V = intersect(S.basis, W)
    plane = series_to_plane(cfg, LinearSeries(S.sheaf, V))
    assert chord(cfg, 0).issubspace(plane.Lambda)
    with pytest.raises(AmbiguousChord):
        plane_to_series(cfg, plane)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.sampled_from([(1, 1), (2, 1), (2, 2)]), st.integers(0, 10 ** 6))
def test_round_trip_and_torus_action(g, dd, seed):
    cfg = config(g, dd, seed=seed % 5)
    rng = random.Random(seed)
    r = rng.randint(0, max(0, sum(dd) - g))
    try:
        ls = random_series(cfg, r, rng, tries=50)
    except RuntimeError:
        return
    Lam = series_to_plane(cfg, ls).Lambda
    assert Lam.dim == sum(dd) - r + 1
    try:
        back = plane_to_series(cfg, Lam)
    except AmbiguousChord:
        return
    assert back == ls
    y = rng.randrange(1, 11)
    moved = torus_act(cfg, Lam, y)
    assert plane_to_series(cfg, moved) == ls
    raw = raw_gluing(cfg, moved)
    assert series_to_plane(cfg, plane_to_series(cfg, moved)).Lambda == torus_act(cfg, moved, raw[0])


def test_dictionary_trivial_case():
    cfg = config(1, (2, 1))
    rng = random.Random(1)
    ls = random_series(cfg, 1, rng)
    Lam = series_to_plane(cfg, ls).Lambda
    assert dictionary_check(cfg, Lam, 0, 0, 0)
    with pytest.raises(ValueError):
        dictionary_check(cfg, Lam, 3, 0, 0)


@pytest.mark.parametrize("g,dd", [(0, (1, 1)), (1, (2, 1)), (2, (2, 2))])
def test_crosscheck_has_no_failures(g, dd):
    cfg = config(g, dd)
    for r in range(0, max(0, sum(dd) - g) + 1):
        res = crosscheck(cfg, r, 25, 25, random.Random(f"{g}{dd}{r}"))
        assert res.failures == 0
        assert res.planes == 25 and res.dictionary_draws == 25


def test_crosscheck_is_deterministic():
    cfg = config(1, (2, 1))
    a = crosscheck(cfg, 1, 10, 10, random.Random("x")).as_dict()
    b = crosscheck(cfg, 1, 10, 10, random.Random("x")).as_dict()
    assert a == b
