import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jitower.groups import word_image
from jitower.words import (FormalSum, OrderBudget, Word, enumerate_words,
                           fox_eval, fox_identity_defect, fox_vector, word_count)

from conftest import c22, s3


def test_reduce_cancels_adjacent_pairs():
    assert Word.make([1, -1]).letters == ()
    assert Word.make([1, 2, -2, 1]).letters == (1, 1)


def test_reduce_is_idempotent_on_reduced_words():
    w = Word.make([1, 2, -1, 2])
    assert Word.make(w.letters) == w


def test_letter_validation():
    with pytest.raises(ValueError):
        Word.make([0])
    with pytest.raises(ValueError):
        Word.make([3], rank=2)


def test_word_arithmetic():
    u = Word.make([1, 2])
    assert (u * u.inverse()).letters == ()
    assert (u ** 2).letters == (1, 2, 1, 2)
    assert (u ** -1) == u.inverse()
    assert (u ** 0) == Word()


def test_enumeration_counts():
    words = enumerate_words(2, 1)
    assert len(words) == 5
    assert words[0] == Word()
    exactly_two = [w for w in enumerate_words(2, 2) if len(w) == 2]
    assert len(exactly_two) == 12 == word_count(2, 2)
    assert enumerate_words(2, 0) == [Word()]


def test_enumeration_matches_closed_formula_and_is_sorted():
    for d in (2, 3):
        words = enumerate_words(d, 4)
        by_len = {}
        for w in words:
            by_len.setdefault(len(w), []).append(w)
        for n in range(1, 5):
            assert len(by_len[n]) == word_count(d, n)
        assert len(set(words)) == len(words)
    # (length, lex) order: lengths ascend, x1 before x1^-1 before x2
    words = enumerate_words(2, 2)
    assert [w.letters for w in words[:7]] == [
        (), (1,), (-1,), (2,), (-2,), (1, 1), (1, 2)]


def test_budget_values_depend_only_on_length():
    budget = OrderBudget(16, 8)
    for w in enumerate_words(2, 3):
        assert budget.of(w) == 16 * 8 ** len(w)
    # nondecreasing in the length
    values = [budget.of_length(n) for n in range(8)]
    assert values == sorted(values)


def test_budget_tail_sum_admissible():
    budget = OrderBudget(16, 8)
    assert budget.tail_sum(2) == Fraction(1, 20)
    # 0.05 < 0.1
    assert budget.admissible(2, Fraction(1, 5))
    # the stock budget sits exactly at the boundary for eps = 1/10
    assert budget.admissible(2, Fraction(1, 10))
    assert not OrderBudget(1, 8).admissible(2, Fraction(1, 5))
    with pytest.raises(ValueError):
        OrderBudget(16, 3).tail_sum(2)   # base = 2d-1 diverges
    with pytest.raises(ValueError):
        budget.admissible(2, Fraction(1, 3))


def test_budget_tail_sum_against_partial_summation():
    # oracle: exact partial sum to length 40 plus the exact geometric
    # remainder reproduces the closed form
    budget = OrderBudget(16, 8)
    d = 2
    partial = sum(Fraction(word_count(d, n), budget.of_length(n))
                  for n in range(1, 41))
    ratio = Fraction(2 * d - 1, budget.base)
    remainder = (Fraction(word_count(d, 41), budget.of_length(41))
                 / (1 - ratio))
    assert partial + remainder == budget.tail_sum(d)
    assert partial < budget.tail_sum(d)


def _sample_images(group, rng, d=2):
    els = group.elements()
    return [els[rng.randrange(len(els))] for _ in range(d)]


def test_fox_base_cases():
    g = c22()
    p = 3
    t1, t2 = g.generators
    one = g.identity
    # d(x1 x2)/dx1 = 1
    assert fox_eval(Word.make([1, 2]), 1, [t1, t2], one, p) == FormalSum.one(p, one)
    # d(x1^-1)/dx1 = -x1^-1
    assert (fox_eval(Word.make([-1]), 1, [t1, t2], one, p)
            == FormalSum(p, {t1.inverse(): -1}))


def test_fox_conjugate_expansion():
    # d(x1 x2 x1^-1)/dx1 = 1 - x1 x2 x1^-1, by the product rule by hand
    g = s3()
    p = 5
    t1, t2 = g.generators
    one = g.identity
    w = Word.make([1, 2, -1])
    value = t1 * t2 * t1.inverse()
    assert (fox_eval(w, 1, [t1, t2], one, p)
            == FormalSum(p, {one: 1, value: -1}))


def test_fox_fundamental_identity_random():
    rng = random.Random(11)
    for group in (c22(), s3()):
        one = group.identity
        for _ in range(200):
            images = _sample_images(group, rng)
            letters = [rng.choice([1, -1]) * rng.randint(1, 2)
                       for _ in range(rng.randint(0, 10))]
            w = Word.make(letters)
            assert fox_identity_defect(w, images, one, 5).is_zero()


def test_fox_product_rule_random():
    rng = random.Random(12)
    group = s3()
    one = group.identity
    p = 7
    for _ in range(150):
        images = _sample_images(group, rng)
        u = Word.make([rng.choice([1, -1]) * rng.randint(1, 2)
                       for _ in range(rng.randint(0, 6))])
        v = Word.make([rng.choice([1, -1]) * rng.randint(1, 2)
                       for _ in range(rng.randint(0, 6))])
        du, pu = fox_vector(u, images, one, p)
        dv, _ = fox_vector(v, images, one, p)
        duv, _ = fox_vector(u * v, images, one, p)
        for i in range(2):
            assert duv[i] == du[i] + dv[i].translated(pu)


def test_formal_sum_arithmetic():
    g = c22()
    one = g.identity
    t = g.generators[0]
    a = FormalSum(3, {one: 2, t: 1})
    b = FormalSum(3, {one: 1, t: 2})
    assert a + b == FormalSum(3, {})
    assert (a - a).is_zero()
    assert a.scaled(3).is_zero()
    # (1 + t)(1 - t) = 1 - t^2 = 0 in F_3[C2x...] with t of order 2
    c = FormalSum(3, {one: 1, t: 1})
    d = FormalSum(3, {one: 1, t: -1})
    assert (c * d).is_zero()


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=12))
def test_word_image_respects_reduction(letters):
    g = c22()
    w = Word.make(letters)
    img = word_image(w, g.generators, g.identity)
    # evaluating the unreduced letters directly gives the same image
    direct = g.identity
    for x in letters:
        gen = g.generators[abs(x) - 1]
        direct = direct * (gen if x > 0 else gen.inverse())
    assert img == direct
