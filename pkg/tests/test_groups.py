from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_smith_diagonal, determinantal_divisors, evaluate, transitive_actions
from zerosurgery.diagram import bundled_table, from_dt, mirror, realize
from zerosurgery.groups import (AbelianGroup, GroupError, GroupPresentation, MissingLongitude,
                                abelianization, cyclic_reduce, exponent_sums, format_presentation,
                                format_word, inverse, parse_presentation, parse_word, reduce_word,
                                tietze_simplify, wirtinger, zero_surgery_group,
                                zero_surgery_presentation)
from zerosurgery.smith import invariant_factors, is_divisibility_chain, smith_normal_form

TABLE = bundled_table()
FRIENDS = bundled_table("friend_knots")
Z = AbelianGroup(1)

words = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=12)


def test_word_helpers():
    assert reduce_word([1, 2, -2, -1, 3]) == (3,)
    assert inverse((1, -2, 3)) == (-3, 2, -1)
    assert cyclic_reduce((-1, 2, 3, 1)) == (2, 3)
    assert exponent_sums((1, 1, -2, 3, -1), 3) == [1, -1, 1]
    assert format_word((1, -2, 3)) == "aBc"
    assert parse_word("aBc") == (1, -2, 3)


@given(words, words)
def test_reduction_properties(u, v):
    r = reduce_word(u)
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert reduce_word(r) == r
    assert reduce_word(list(u) + list(inverse(u))) == ()
    assert inverse(inverse(r)) == r
    assert reduce_word(reduce_word(u) + reduce_word(v)) == reduce_word(list(u) + list(v))


def test_presentation_validation():
    with pytest.raises(GroupError):
        GroupPresentation(1, ((2,),))
    with pytest.raises(GroupError):
        # a generator of an infinite cyclic group is not null-homologous
        GroupPresentation(1, (), (1,), (1,))
    with pytest.raises(GroupError):
        AbelianGroup(0, (4, 2))


def test_text_format_roundtrip():
    p = GroupPresentation(2, ((1, 1, -2), (2, 1, -2, -1)), (1,), (1, 2, -1, -2))
    text = format_presentation(p)
    assert text == "gens: 2; rel: aaB; rel: baBA; mer: a; lon: abAB"
    assert parse_presentation(text) == p
    with pytest.raises(GroupError):
        parse_presentation("rel: ab")


def test_wirtinger_examples():
    u = wirtinger(from_dt(""))
    assert (u.generators, u.relators, u.meridian, u.longitude) == (1, (), (1,), ())
    t = wirtinger(from_dt("4 6 2"))
    assert t.generators == 3 and len(t.relators) == 3
    assert abelianization(t) == Z
    assert sum(exponent_sums(t.longitude, 3)) == 0
    assert len(wirtinger(from_dt("4 6 2"), drop_redundant=True).relators) == 2


def test_zero_surgery_examples():
    z = zero_surgery_group(wirtinger(from_dt("")))
    assert z.generators == 1 and z.relators == () and abelianization(z) == Z
    assert abelianization(zero_surgery_group(wirtinger(from_dt("4 6 2")))) == Z
    with pytest.raises(MissingLongitude):
        zero_surgery_group(GroupPresentation(1, ()))


def test_abelianization_examples():
    assert abelianization(GroupPresentation(2, ((1, 1, -2, -2, -2),))) == Z
    assert abelianization(GroupPresentation(1, ((1, 1, 1),))) == AbelianGroup(0, (3,))
    # relator matrix [[2, 4], [6, 8]]
    p = GroupPresentation(2, ((1,) * 2 + (2,) * 4, (1,) * 6 + (2,) * 8))
    assert abelianization(p) == AbelianGroup(0, (2, 4))
    assert determinantal_divisors([[2, 4], [6, 8]]) == [2, 4]


matrices = st.integers(1, 4).flatmap(lambda c: st.lists(
    st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=0, max_size=4).map(
        lambda rows: (rows, c)))


@settings(max_examples=150, deadline=None)
@given(matrices)
def test_smith_normal_form(data):
    rows, ncols = data
    snf = smith_normal_form(rows, ncols, transforms=True)
    expected = determinantal_divisors(rows) if rows else []
    assert snf.diagonal == expected
    assert dense_smith_diagonal(rows) == expected
    assert is_divisibility_chain(snf.diagonal)
    # replay the recorded transforms: U M V is diagonal
    m, n = len(rows), ncols
    U, V = snf.left, snf.right
    D = [[sum(U[i][k] * rows[k][l] * V[l][j] for k in range(m) for l in range(n))
          for j in range(n)] for i in range(m)]
    for i in range(m):
        for j in range(n):
            want = snf.diagonal[i] if i == j and i < len(snf.diagonal) else 0
            assert abs(D[i][j]) == abs(want)
    sparse = [{j: v for j, v in enumerate(r) if v} for r in rows]
    rank, torsion = invariant_factors(sparse, ncols)
    assert rank == ncols - len(expected)
    assert torsion == [d for d in expected if d > 1]


@pytest.mark.parametrize("record", TABLE + FRIENDS, ids=lambda r: r.name)
def test_knot_and_zero_surgery_homology(record):
    d = realize(record.dt)
    for diagram in (d, mirror(d)):
        w = wirtinger(diagram)
        assert abelianization(w) == Z
        # all Wirtinger generators are homologous, so only the total matters
        assert sum(exponent_sums(w.longitude, w.generators)) == 0
        assert w.is_null_homologous(w.longitude)
        assert abelianization(zero_surgery_group(w)) == Z
    assert abelianization(zero_surgery_presentation(d)) == Z


def _commute_everywhere(p: GroupPresentation, degree: int) -> bool:
    for images in transitive_actions(p.generators, p.relators, degree):
        mu = evaluate(p.meridian, images)
        lam = evaluate(p.longitude, images)
        if evaluate((1, 2), (mu, lam)) != evaluate((2, 1), (mu, lam)):
            return False
    return True


@pytest.mark.parametrize("dt", ["4 6 2", "4 6 8 2", "-4 -6 -2", "6 8 10 2 4"])
def test_longitude_commutes_with_meridian(dt):
    d = from_dt(dt)
    p = tietze_simplify(wirtinger(d))
    assert p.generators <= 3
    assert _commute_everywhere(p, 4)


def test_tietze_examples():
    p = tietze_simplify(GroupPresentation(2, ((2,),)))
    assert p.generators == 1 and p.relators == ()
    t = tietze_simplify(wirtinger(from_dt("4 6 2")))
    assert t.generators == 2 and abelianization(t) == Z
    minimal = GroupPresentation(2, ((1, 2, 1, -2, -1, -2),))
    assert tietze_simplify(minimal) == minimal
    assert tietze_simplify(tietze_simplify(t)) == tietze_simplify(t)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(TABLE))
def test_tietze_keeps_peripheral_words_consistent(record):
    raw = zero_surgery_group(wirtinger(realize(record.dt), drop_redundant=True))
    p = tietze_simplify(raw)
    assert p.generators <= raw.generators
    assert abelianization(p) == abelianization(raw) == Z
    # the meridian still generates H1: killing it kills the abelianization
    assert abelianization(GroupPresentation(p.generators, p.relators + (p.meridian,))) == AbelianGroup(0)
    # the longitude is trivial in the 0-surgery group, so in every action
    for images in transitive_actions(p.generators, p.relators, 3):
        assert evaluate(p.longitude, images) == tuple(range(3))
