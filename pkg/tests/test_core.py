from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from twodist import (
    Classification,
    Code,
    CodeError,
    Codeword,
    LengthMismatch,
    NotConstantWeight,
    Packing,
    PairCoveredTwice,
    TwoDistanceParams,
    classify_two_distance,
    code_from_packing,
    constant_weight_translator,
    distance,
    distance_set,
    intersection_weight,
    packing_from_code,
    translate,
    weight_distribution,
)
from twodist.packings import bose_sts

FANO = [(1, 2, 3), (1, 4, 5), (1, 6, 7), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 5, 6)]


def W(s):
    return Codeword.from_str(s)


def fano_code():
    return code_from_packing(Packing(7, 3, FANO))


def words(n):
    return st.integers(0, (1 << n) - 1).map(lambda b: Codeword(n, b))


@pytest.mark.parametrize("u, v, expected", [
    ("000000", "000000", 0),
    ("110000", "001100", 4),
    ("111100", "111111", 2),
])
def test_distance_examples(u, v, expected):
    assert distance(W(u), W(v)) == expected


def test_length_mismatch():
    with pytest.raises(LengthMismatch):
        distance(W("01"), W("011"))
    with pytest.raises(LengthMismatch):
        intersection_weight(W("01"), W("011"))
    with pytest.raises(LengthMismatch):
        translate(Code.from_strings(["00"]), W("000"))


def test_codeword_parsing():
    w = W("0110")
    assert w.weight == 2
    assert w.support == (1, 2)
    assert str(w) == "0110"
    assert Codeword.from_support(4, [1, 2]) == w
    with pytest.raises(CodeError):
        W("01a")
    with pytest.raises(CodeError):
        Codeword.from_support(3, [3])


def test_distance_set_examples():
    assert distance_set(Code.from_strings(["0000"])) == frozenset()
    assert distance_set(Code.from_strings(["0000", "1100", "0011"])) == {2, 4}
    assert distance_set(fano_code()) == {4}


def test_code_rejects_duplicates_and_sorts():
    with pytest.raises(CodeError):
        Code.from_strings(["0101", "0101"])
    c = Code.from_strings(["11", "00", "10"])
    assert [str(w) for w in c] == ["00", "10", "11"]
    assert Code.from_strings(["10", "00"]) == Code.from_strings(["00", "10"])


def test_classify():
    assert classify_two_distance(
        Code.from_strings(["0000", "1100", "0011"]), TwoDistanceParams(4, 2, 4)
    ) is Classification.EXACT
    assert classify_two_distance(fano_code(), TwoDistanceParams(7, 4, 6)) is Classification.SUBSET_ONLY
    assert classify_two_distance(Code.from_strings(["000", "111"]), TwoDistanceParams(3, 1, 2)) is Classification.NO
    assert classify_two_distance(Code.from_strings(["000"]), TwoDistanceParams(3, 1, 2)) is Classification.NO


def test_params_validation():
    for bad in [(4, 0, 2), (4, 3, 3), (4, 2, 5)]:
        with pytest.raises(ValueError):
            TwoDistanceParams(*bad)
    assert TwoDistanceParams(10, 4, 7).delta == 3


def test_translate_examples():
    c = Code.from_strings(["0000", "1100"])
    assert translate(c, W("0000")) == c
    assert translate(c, W("1100")) == Code.from_strings(["1100", "0000"])


@given(st.integers(1, 12).flatmap(lambda n: st.tuples(st.sets(words(n), min_size=1, max_size=10), words(n))))
def test_xor_isometry(data):
    ws, y = data
    c = Code(y.n, ws)
    t = translate(c, y)
    assert distance_set(t) == distance_set(c)
    assert translate(t, y) == c


@given(st.integers(1, 16).flatmap(lambda n: st.tuples(words(n), words(n), words(n))))
def test_metric_axioms(t):
    u, v, w = t
    assert distance(u, v) == distance(v, u)
    assert distance(u, w) <= distance(u, v) + distance(v, w)
    assert distance(u ^ w, v ^ w) == distance(u, v)


@pytest.mark.parametrize("n", range(1, 9))
def test_intersection_identity_exhaustive(n):
    all_words = [Codeword(n, b) for b in range(1 << n)]
    for u in all_words:
        for v in all_words:
            assert 2 * intersection_weight(u, v) == u.weight + v.weight - distance(u, v)


def test_intersection_examples():
    assert intersection_weight(W("1100"), W("0110")) == 1
    assert intersection_weight(W("1111"), W("0000")) == 0


def test_weight_distribution():
    assert weight_distribution(Code.from_strings(["0000"])) == {0: 1}
    assert weight_distribution(fano_code()) == {3: 7}
    assert weight_distribution(Code.from_strings(["0000", "1100", "0011", "1111"])) == {0: 1, 2: 2, 4: 1}


def test_code_from_packing_examples():
    assert code_from_packing(Packing(4, 3, [(1, 2, 3)])) == Code.from_strings(["1110"])
    c = code_from_packing(Packing(5, 3, [(1, 2, 3), (1, 4, 5)]))
    assert c == Code.from_strings(["11100", "10011"])
    assert distance_set(c) == {4}


def test_sts9_code_is_exact_and_round_trips():
    p = bose_sts(9)
    c = code_from_packing(p)
    assert len(c) == 12
    assert classify_two_distance(c, TwoDistanceParams(9, 4, 6)) is Classification.EXACT
    back = packing_from_code(c)
    assert sorted(back.blocks) == sorted(p.blocks)


def test_packing_from_code_errors():
    p = packing_from_code(Code.from_strings(["11100", "10011"]))
    assert (p.v, p.k, sorted(p.blocks)) == (5, 3, [(1, 2, 3), (1, 4, 5)])
    with pytest.raises(PairCoveredTwice) as e:
        packing_from_code(Code.from_strings(["1110", "1101"]))
    assert e.value.pair == (1, 2)
    with pytest.raises(NotConstantWeight):
        packing_from_code(Code.from_strings(["1100", "1110"]))


@st.composite
def packings(draw):
    v = draw(st.integers(3, 10))
    k = draw(st.integers(2, min(5, v)))
    order = draw(st.permutations(list(combinations(range(1, v + 1), k))))
    covered, blocks = set(), []
    for b in order[: draw(st.integers(0, 30))]:
        pairs = set(combinations(b, 2))
        if not pairs & covered:
            covered |= pairs
            blocks.append(b)
    return Packing(v, k, blocks)


@given(packings())
def test_round_trip_and_distance_property(p):
    c = code_from_packing(p)
    assert sorted(packing_from_code(c).blocks) == sorted(p.blocks)
    k = p.k
    ds = distance_set(c)
    assert ds <= {2 * k - 2, 2 * k}
    meets = {len(set(a) & set(b)) for a, b in combinations(p.blocks, 2)}
    assert (ds == {2 * k - 2, 2 * k}) == (meets == {0, 1})


def brute_force_translators(c):
    return [
        Codeword(c.n, y) for y in range(1 << c.n)
        if len({distance(Codeword(c.n, y), x) for x in c}) == 1
    ]


def test_translator_examples():
    assert constant_weight_translator(fano_code()) == Codeword.zero(7)
    y = constant_weight_translator(Code.from_strings(["00", "11"]))
    assert y is not None and {distance(y, x) for x in Code.from_strings(["00", "11"])} == {1}
    c = Code.from_strings(["0000", "1100", "0011", "1111"])
    y = constant_weight_translator(c)
    assert (y is None) == (not brute_force_translators(c))
    if y is not None:
        assert len(weight_distribution(translate(c, y))) == 1


def test_translator_limit():
    with pytest.raises(CodeError):
        constant_weight_translator(Code.from_strings(["0" * 30]), max_n=24)


@given(st.integers(1, 9).flatmap(lambda n: st.sets(words(n), min_size=1, max_size=8).map(lambda s: Code(n, s))))
def test_translator_matches_brute_force(c):
    y = constant_weight_translator(c)
    brute = brute_force_translators(c)
    assert (y is None) == (not brute)
    if y is not None:
        assert y in brute
        assert len(weight_distribution(translate(c, y))) == 1


def test_translator_exhaustive_n3():
    # every code of length 3 with at least two words
    all_words = [Codeword(3, b) for b in range(8)]
    for r in range(2, 9):
        for ws in combinations(all_words, r):
            c = Code(3, ws)
            assert (constant_weight_translator(c) is None) == (not brute_force_translators(c))
